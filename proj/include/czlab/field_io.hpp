#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "czlab/field.hpp"
#include "czlab/maximal.hpp"

namespace czlab {

/// Node-major multi-channel payload as stored in a CZF1 file.
struct RawField {
  Grid grid;
  int channels = 1;
  std::vector<double> data;  // node-major, channels interleaved

  double at(Index node, int channel) const { return data[static_cast<std::size_t>(node * channels + channel)]; }
};

// CZF1 layout (little endian): "CZF1", u32 n, u32 m (per axis), f64 lo[n],
// f64 hi[n], u8 has_time, [f64 t_lo, f64 tau, u32 nt], u32 channels, payload.
void write_czf(std::ostream& os, const RawField& f);
RawField read_czf(std::istream& is);

RawField to_raw(const ScalarField& f);
RawField to_raw(const SymTensorField& f);
/// Channel 0 holds the maximal value, channel 1 the argmax radius; nodes not
/// evaluated or without an admissible radius carry 0 in both.
RawField to_raw(const MaximalField& f);

ScalarField scalar_from_raw(const RawField& f, int channel = 0);

void save_czf(const std::string& path, const RawField& f);
RawField load_czf(const std::string& path);

/// One row per node: coordinates, time (if any), then every channel.
void write_csv(std::ostream& os, const RawField& f);
void save_csv(const std::string& path, const RawField& f);

}  // namespace czlab
