#ifndef EQODDS_CHECKPOINT_H_
#define EQODDS_CHECKPOINT_H_

#include <string>

#include "eqodds/network.h"

namespace eqodds {

// Binary checkpoint, all integers and doubles little-endian:
//
//   char[8]  magic "EQODCKPT"
//   u32      format version (1)
//   u64      input_dim
//   u64      output_dim
//   u32      hidden layer count H, then H x u64 widths
//   u8       layer_norm, u8 spectral_norm
//   u32      label length L, then L bytes of label (e.g. "Standard")
//   per layer, in order: weight (in * out f64, input-major), bias (out),
//   gamma and beta (out each, hidden layers with layer norm), u (out,
//   spectral norm only)
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetworkSpec spec;
  NetworkParams params;
  std::string label;
};

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
// Throws ValidationError on a malformed or truncated buffer.
Checkpoint DeserializeCheckpoint(const std::string& bytes);

void WriteCheckpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint ReadCheckpoint(const std::string& path);

}  // namespace eqodds

#endif  // EQODDS_CHECKPOINT_H_
