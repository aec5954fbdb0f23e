#pragma once

#include "swelab/sampler.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace swelab {

/// Long-format CSV with header "replication_id,tau,lambda,value", one row
/// per grid point per replication, values at full double precision.
void write_csv(std::ostream& os, const std::vector<FieldSample>& samples);

/// Binary layout: magic "SWEB", uint32 little-endian header length, JSON
/// header {dims, seed, replication_id, beta, band}, then the values in
/// column-major order as raw doubles.
void write_binary(std::ostream& os, const FieldSample& sample, double beta);

/// Reads a sample written by write_binary; beta_out receives the header's
/// beta. Throws runtime_error on a malformed stream.
FieldSample read_binary(std::istream& is, double& beta_out);

/// Full-precision decimal rendering of a double (max_digits10).
std::string format_double(double v);

} // namespace swelab
