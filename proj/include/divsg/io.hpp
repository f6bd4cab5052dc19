#pragma once

#include <iosfwd>
#include <string>

#include "divsg/fields.hpp"

namespace divsg {

// Self-describing binary container. Layout (little-endian):
//   magic "DVSF" | version u32 | payload kind u8 (1 scalar, 2 vector, 3 map)
//   | domain kind u8 | dim u8 | per axis: lower f64, length f64, resolution u32
//   | component count u32 | f64 samples per component, row-major, last axis fastest.
// Maps reuse the vector layout with kind tag 3 (components are image coordinates).

void write_dvsf(std::ostream& os, const ScalarField& f);
void write_dvsf(std::ostream& os, const VectorField& f, bool map_kind = false);
void write_dvsf_file(const std::string& path, const ScalarField& f);
void write_dvsf_file(const std::string& path, const VectorField& f, bool map_kind = false);

struct DvsfPayload {
    int kind = 0;  // 1 scalar, 2 vector, 3 map
    Domain domain = Domain::unit_torus(1, 8);
    std::vector<ScalarField> components;
};

DvsfPayload read_dvsf(std::istream& is);
DvsfPayload read_dvsf_file(const std::string& path);

ScalarField read_scalar_dvsf(const std::string& path);
VectorField read_vector_dvsf(const std::string& path);

/// Lossy CSV export for plotting: one row per node, coordinates then values.
void write_csv(std::ostream& os, const ScalarField& f);
void write_csv(std::ostream& os, const VectorField& f);
void write_csv_file(const std::string& path, const ScalarField& f);
void write_csv_file(const std::string& path, const VectorField& f);

}  // namespace divsg
