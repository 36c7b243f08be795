#include "gmi/checkpoint.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "json.hpp"

using nlohmann::json;

namespace gmi {

namespace {

constexpr char kMagic[4] = {'G', 'M', 'I', '1'};

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

std::vector<const Tensor*> param_list(const ConvVaeGan& model) {
  std::vector<const Tensor*> out;
  auto add = [&](const Network& net) {
    for (const Layer& l : net.layers)
      if (l.has_params()) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
      }
  };
  add(model.encoder);
  add(model.decoder);
  add(model.discriminator);
  return out;
}

json arch_json(const VaeGanArch& a) {
  return json{{"arch", "convvaegan"},
              {"version", 1},
              {"z_dim", a.z_dim},
              {"image_size", a.image_size},
              {"enc_channels", a.enc_channels},
              {"disc_channels", a.disc_channels}};
}

bool same_arch(const VaeGanArch& a, const VaeGanArch& b) {
  return a.z_dim == b.z_dim && a.image_size == b.image_size &&
         a.enc_channels == b.enc_channels && a.disc_channels == b.disc_channels;
}

}  // namespace

void save_checkpoint(const ConvVaeGan& model, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(Err::IoError, "cannot write " + path);
  std::string desc = arch_json(model.arch).dump();
  uint32_t len = uint32_t(desc.size());
  bool ok = std::fwrite(kMagic, 1, 4, f.get()) == 4 &&
            std::fwrite(&len, 4, 1, f.get()) == 1 &&
            std::fwrite(desc.data(), 1, desc.size(), f.get()) == desc.size();
  for (const Tensor* t : param_list(model))
    ok = ok && std::fwrite(t->v.data(), sizeof(float), t->v.size(), f.get()) == t->v.size();
  uint64_t iter = uint64_t(model.iteration);
  ok = ok && std::fwrite(&iter, 8, 1, f.get()) == 1;
  if (!ok) fail(Err::IoError, "short write: " + path);
}

ConvVaeGan load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) fail(Err::IoError, "cannot open " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4) fail(Err::CorruptFile, "truncated header");
  if (std::memcmp(magic, "GMI", 3) != 0)
    fail(Err::CorruptFile, "not a checkpoint file: " + path);
  if (magic[3] != '1')
    fail(Err::VersionMismatch, std::string("unsupported format version '") + magic[3] + "'");
  uint32_t len = 0;
  if (std::fread(&len, 4, 1, f.get()) != 1) fail(Err::CorruptFile, "truncated header");
  if (len == 0 || len > (1u << 20)) fail(Err::CorruptFile, "implausible descriptor length");
  std::string desc(len, '\0');
  if (std::fread(desc.data(), 1, len, f.get()) != len)
    fail(Err::CorruptFile, "truncated descriptor");

  VaeGanArch arch;
  try {
    json j = json::parse(desc);
    if (j.at("arch").get<std::string>() != "convvaegan")
      fail(Err::ArchitectureMismatch, "unknown architecture " + j.at("arch").dump());
    if (j.at("version").get<int>() != 1)
      fail(Err::VersionMismatch, "descriptor version " + j.at("version").dump());
    arch.z_dim = j.at("z_dim").get<int>();
    arch.image_size = j.at("image_size").get<int>();
    arch.enc_channels = j.at("enc_channels").get<std::vector<int>>();
    arch.disc_channels = j.at("disc_channels").get<std::vector<int>>();
  } catch (const json::exception& e) {
    fail(Err::CorruptFile, std::string("bad descriptor: ") + e.what());
  }

  ConvVaeGan model(arch, 0);
  for (const Tensor* t : param_list(model)) {
    Tensor& dst = const_cast<Tensor&>(*t);
    if (std::fread(dst.v.data(), sizeof(float), dst.v.size(), f.get()) != dst.v.size())
      fail(Err::CorruptFile, "truncated parameter block");
    if (!dst.all_finite()) fail(Err::CorruptFile, "non-finite parameters");
  }
  uint64_t iter = 0;
  if (std::fread(&iter, 8, 1, f.get()) != 1) fail(Err::CorruptFile, "missing iteration counter");
  model.iteration = int64_t(iter);
  if (std::fgetc(f.get()) != EOF) fail(Err::CorruptFile, "trailing bytes");
  return model;
}

ConvVaeGan load_checkpoint_expect(const std::string& path, const VaeGanArch& expect) {
  ConvVaeGan model = load_checkpoint(path);
  if (!same_arch(model.arch, expect))
    fail(Err::ArchitectureMismatch,
         "checkpoint architecture " + arch_json(model.arch).dump() + " != expected " +
             arch_json(expect).dump());
  return model;
}

}  // namespace gmi
