#include "mbg/net/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "mbg/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace mbg::net {

namespace {

constexpr char kMagic[4] = {'M', 'B', 'G', 'V'};
constexpr std::uint32_t kVersion = 1;

using nlohmann::json;

void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

template <typename U>
void put_pod(std::string& out, U v) {
  put_bytes(out, &v, sizeof v);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) fail("checkpoint truncated: " + path);
  }
  void read(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  template <typename U>
  U pod() {
    U v;
    read(&v, sizeof v);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(buf.data() + pos, n);
    pos += n;
    return s;
  }
};

void append_tensor_block(std::string& out, const char* name,
                         const TensorShape& sh,
                         const std::vector<float>& data, std::uint8_t kind) {
  const std::string full = std::string(name);
  put_pod<std::uint16_t>(out, std::uint16_t(full.size()));
  put_bytes(out, full.data(), full.size());
  put_pod<std::uint8_t>(out, kind);
  put_pod<std::uint8_t>(out, 2);
  put_pod<std::uint32_t>(out, std::uint32_t(sh.rows));
  put_pod<std::uint32_t>(out, std::uint32_t(sh.cols));
  put_bytes(out, data.data(), data.size() * sizeof(float));
}

json config_to_json(const NetConfig& c) {
  return json{{"n_blocks", c.n_blocks},
              {"layers_per_block", c.layers_per_block},
              {"residual_channels", c.residual_channels},
              {"skip_channels", c.skip_channels},
              {"condition_dim", c.condition_dim}};
}

NetConfig config_from_json(const json& j) {
  NetConfig c;
  c.n_blocks = j.at("n_blocks").get<int>();
  c.layers_per_block = j.at("layers_per_block").get<int>();
  c.residual_channels = j.at("residual_channels").get<int>();
  c.skip_channels = j.at("skip_channels").get<int>();
  c.condition_dim = j.at("condition_dim").get<int>();
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json meta;
  meta["config"] = config_to_json(ckpt.config);
  json prov{{"mode", ckpt.prov.mode},
            {"seed", ckpt.prov.seed},
            {"condition_source", ckpt.prov.condition_source},
            {"train_steps", ckpt.prov.train_steps}};
  if (!ckpt.prov.parent.empty()) prov["parent"] = ckpt.prov.parent;
  if (ckpt.prov.has_final_valid_nll)
    prov["final_valid_nll"] = ckpt.prov.final_valid_nll;
  meta["provenance"] = prov;
  meta["adam_step"] = ckpt.adam.step;
  const std::string meta_str = meta.dump();

  std::string out;
  put_bytes(out, kMagic, 4);
  put_pod<std::uint32_t>(out, kVersion);
  put_pod<std::uint32_t>(out, std::uint32_t(meta_str.size()));
  put_bytes(out, meta_str.data(), meta_str.size());

  const auto& shapes = ckpt.params.shapes;
  put_pod<std::uint32_t>(out, std::uint32_t(3 * shapes.size()));
  for (std::size_t i = 0; i < shapes.size(); ++i)
    append_tensor_block(out, shapes[i].name.c_str(), shapes[i],
                        ckpt.params.data[i], 0);
  for (std::size_t i = 0; i < shapes.size(); ++i)
    append_tensor_block(out, shapes[i].name.c_str(), shapes[i],
                        ckpt.adam.m.data[i], 1);
  for (std::size_t i = 0; i < shapes.size(); ++i)
    append_tensor_block(out, shapes[i].name.c_str(), shapes[i],
                        ckpt.adam.v.data[i], 2);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail("cannot open checkpoint for writing: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) fail("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("cannot open checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  Reader rd{buf, 0, path};

  char magic[4];
  rd.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    fail("not a checkpoint file (bad magic): " + path);
  const auto version = rd.pod<std::uint32_t>();
  if (version != kVersion)
    fail("unsupported checkpoint version " + std::to_string(version) + ": " +
         path);
  const auto meta_len = rd.pod<std::uint32_t>();
  json meta;
  try {
    meta = json::parse(rd.str(meta_len));
  } catch (const std::exception& e) {
    fail("checkpoint metadata is not valid JSON: " + path);
  }

  Checkpoint ckpt;
  ckpt.config = config_from_json(meta.at("config"));
  const auto& prov = meta.at("provenance");
  ckpt.prov.mode = prov.at("mode").get<std::string>();
  ckpt.prov.seed = prov.at("seed").get<std::uint64_t>();
  ckpt.prov.condition_source = prov.at("condition_source").get<std::string>();
  if (prov.contains("parent"))
    ckpt.prov.parent = prov.at("parent").get<std::string>();
  if (prov.contains("final_valid_nll")) {
    ckpt.prov.final_valid_nll = prov.at("final_valid_nll").get<double>();
    ckpt.prov.has_final_valid_nll = true;
  }
  ckpt.prov.train_steps = prov.at("train_steps").get<std::int64_t>();

  ckpt.params = make_param_set<float>(ckpt.config);
  ckpt.adam = make_adam_state<float>(ckpt.config);
  ckpt.adam.step = meta.at("adam_step").get<std::uint64_t>();

  const auto n_tensors = rd.pod<std::uint32_t>();
  if (n_tensors != 3 * ckpt.params.n_tensors())
    fail("checkpoint tensor count mismatch: " + path);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    const auto name_len = rd.pod<std::uint16_t>();
    const std::string name = rd.str(name_len);
    const auto kind = rd.pod<std::uint8_t>();
    const auto ndim = rd.pod<std::uint8_t>();
    if (ndim != 2) fail("checkpoint tensor rank must be 2: " + path);
    const auto rows = rd.pod<std::uint32_t>();
    const auto cols = rd.pod<std::uint32_t>();
    const std::size_t idx = i % ckpt.params.n_tensors();
    const auto& sh = ckpt.params.shapes[idx];
    if (name != sh.name || rows != sh.rows || cols != sh.cols)
      fail("checkpoint tensor '" + name + "' does not match the declared "
           "layout: " + path);
    std::vector<float>* dst = nullptr;
    if (kind == 0)
      dst = &ckpt.params.data[idx];
    else if (kind == 1)
      dst = &ckpt.adam.m.data[idx];
    else if (kind == 2)
      dst = &ckpt.adam.v.data[idx];
    else
      fail("checkpoint tensor kind unknown: " + path);
    rd.read(dst->data(), dst->size() * sizeof(float));
  }
  return ckpt;
}

}  // namespace mbg::net
