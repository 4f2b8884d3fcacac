#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arld/replay/transition.hpp"

namespace arld::replay {

// Line-delimited JSON: one object per demonstration transition, e.g.
// {"state":[...],"action":1,"reward":1.0,"next_state":[...],"terminal":false}

void write_demos(std::ostream& out, const std::vector<Transition>& demos);
std::vector<Transition> read_demos(std::istream& in);
void write_demos(const std::string& path, const std::vector<Transition>& demos);
std::vector<Transition> read_demos(const std::string& path);

}  // namespace arld::replay
