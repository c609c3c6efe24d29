#pragma once

// Text serialization of fields.
//
//   RIESZLAB-FIELD v1 <kind> <dim> <N> <L>
//   <re> <im>
//   ...
//
// kind is `scalar` (N^dim sample lines) or `vector` (dim components, each
// N^dim lines, component-major). Samples follow the row-major grid layout;
// numbers are written in shortest round-trip form.

#include <iosfwd>
#include <string>

#include "rieszlab/fields.hpp"

namespace rieszlab {

void write_field(std::ostream& out, const ScalarField<double>& f);
void write_field(std::ostream& out, const VectorField<double>& f);
void write_field(const std::string& path, const ScalarField<double>& f);
void write_field(const std::string& path, const VectorField<double>& f);

ScalarField<double> read_scalar_field(std::istream& in);
VectorField<double> read_vector_field(std::istream& in);
ScalarField<double> read_scalar_field(const std::string& path);
VectorField<double> read_vector_field(const std::string& path);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace rieszlab
