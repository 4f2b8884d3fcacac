#include "arld/replay/demo_file.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace arld::replay {

void write_demos(std::ostream& out, const std::vector<Transition>& demos) {
  for (const auto& t : demos) {
    nlohmann::json record = {{"state", t.state},         {"action", t.action},
                             {"reward", t.reward},       {"next_state", t.next_state},
                             {"terminal", t.terminal}};
    out << record.dump() << '\n';
  }
}

std::vector<Transition> read_demos(std::istream& in) {
  std::vector<Transition> demos;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      Transition t;
      t.state = record.at("state").get<std::vector<double>>();
      t.action = record.at("action").get<std::size_t>();
      t.reward = record.at("reward").get<double>();
      t.next_state = record.at("next_state").get<std::vector<double>>();
      t.terminal = record.at("terminal").get<bool>();
      t.is_demo = true;
      demos.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("demo file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return demos;
}

void write_demos(const std::string& path, const std::vector<Transition>& demos) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_demos(out, demos);
}

std::vector<Transition> read_demos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_demos(in);
}

}  // namespace arld::replay
