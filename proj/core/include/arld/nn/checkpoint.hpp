#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "arld/nn/network.hpp"
#include "arld/nn/tensor.hpp"

namespace arld::nn {

// Text checkpoint format, version 1:
//
//   arld-checkpoint 1
//   network <input_dim> <hidden count> <hidden...> <num_actions> <bootstrapped|noisy> <heads>
//   tensor <name> <rank> <dims...>
//   <values as C99 hex floats, one line>
//   ...
//   end
//
// Hex floats make the round trip bit-exact.

inline constexpr int kCheckpointVersion = 1;

void write_tensor(std::ostream& out, std::string_view name, const Tensor& tensor);
/// Reads one tensor record; throws std::runtime_error if its name differs.
Tensor read_tensor(std::istream& in, std::string_view expected_name);

void write_network_body(std::ostream& out, const QNetwork& net);
QNetwork read_network_body(std::istream& in);

void save_network(std::ostream& out, const QNetwork& net);
QNetwork load_network(std::istream& in);
void save_network(const std::string& path, const QNetwork& net);
QNetwork load_network(const std::string& path);

/// Formats a double so that std::strtod reproduces it exactly.
std::string format_exact(double value);
double parse_exact(const std::string& token);

}  // namespace arld::nn
