#pragma once
#include <string>

#include "gmi/vaegan.h"

namespace gmi {

// Checkpoint file layout, all little-endian:
//   magic "GMI1"
//   u32  descriptor byte length
//   UTF-8 JSON architecture descriptor
//   float32 parameter blocks in layer order (encoder, decoder, discriminator;
//           weight then bias per parameterized layer)
//   u64  training iteration counter
void save_checkpoint(const ConvVaeGan& model, const std::string& path);
ConvVaeGan load_checkpoint(const std::string& path);

// As load_checkpoint, but the stored architecture must equal `expect`.
ConvVaeGan load_checkpoint_expect(const std::string& path, const VaeGanArch& expect);

}  // namespace gmi
