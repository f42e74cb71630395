#pragma once

// Text model format, version 1. Line oriented, whitespace separated:
//
//   dek-model 1
//   task <classification|regression>
//   input_dim <d>
//   width_factor <alpha>
//   network embedding            (then: network kernel)
//   hidden_activation <name>
//   output_activation <name>
//   layers <count>
//   layer <out_dim> <in_dim>
//   <out_dim lines of in_dim weights, row-major>
//   <one line of out_dim biases>
//   ...
//   end-model
//
// Numbers are written in shortest round-trip form, so save -> load is exact.

#include <iosfwd>
#include <string>

#include "dek/dek_model.hpp"

namespace dek {

inline constexpr int kModelFormatVersion = 1;

void write_model(const DekModel& model, std::ostream& out);
/// Reads up to and including the "end-model" line; validates the result.
DekModel read_model(std::istream& in);

void save_model(const DekModel& model, const std::string& path);
DekModel load_model(const std::string& path);

}  // namespace dek
