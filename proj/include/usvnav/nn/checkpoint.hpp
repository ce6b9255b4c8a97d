#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include "usvnav/nn/model.hpp"

namespace usvnav::nn {

/// Text checkpoint. Line oriented, whitespace separated:
///
///   usvnav-checkpoint 1
///   agent <iqn|dqn>
///   seed <u64>
///   step <int>
///   topology lidar_beams=.. velocity_hidden=.. goal_hidden=.. lidar_hidden=..
///            state_hidden=.. cosine_features=.. head_hidden=.. actions=..   (one line)
///   meta <key> <value>                       (zero or more)
///   layers <count>
///   layer <index> <out> <in> <relu|identity>
///   weight <out*in values, row-major>
///   bias <out values>
///   ...
///   end
///
/// Values use the shortest decimal form that parses back to the same float,
/// so save/load is bit-exact.
struct Checkpoint {
  AgentKind kind = AgentKind::iqn;
  std::uint64_t seed = 0;
  long long step = 0;
  std::map<std::string, std::string> metadata;
  Model<float> model;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_float(std::ostream& out, float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

inline float parse_float(const std::string& tok) {
  float v = 0.0f;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) throw CheckpointError("bad number in checkpoint: " + tok);
  return v;
}

inline std::string expect_line(std::istream& in, const std::string& key, std::istringstream& rest) {
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError("checkpoint truncated, expected '" + key + "'");
  rest.clear();
  rest.str(line);
  std::string head;
  rest >> head;
  if (head != key) throw CheckpointError("expected '" + key + "' but found '" + head + "'");
  return line;
}

}  // namespace detail

inline std::string topology_string(const Topology& t) {
  std::ostringstream s;
  s << "lidar_beams=" << t.lidar_beams << " velocity_hidden=" << t.velocity_hidden << " goal_hidden=" << t.goal_hidden
    << " lidar_hidden=" << t.lidar_hidden << " state_hidden=" << t.state_hidden
    << " cosine_features=" << t.cosine_features << " head_hidden=" << t.head_hidden << " actions=" << t.actions;
  return s.str();
}

inline Topology parse_topology(std::istream& tokens) {
  Topology t;
  std::string kv;
  while (tokens >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CheckpointError("bad topology entry: " + kv);
    const std::string key = kv.substr(0, eq);
    const int value = std::stoi(kv.substr(eq + 1));
    if (key == "lidar_beams") t.lidar_beams = value;
    else if (key == "velocity_hidden") t.velocity_hidden = value;
    else if (key == "goal_hidden") t.goal_hidden = value;
    else if (key == "lidar_hidden") t.lidar_hidden = value;
    else if (key == "state_hidden") t.state_hidden = value;
    else if (key == "cosine_features") t.cosine_features = value;
    else if (key == "head_hidden") t.head_hidden = value;
    else if (key == "actions") t.actions = value;
    else throw CheckpointError("unknown topology key: " + key);
  }
  return t;
}

inline void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  out << "usvnav-checkpoint 1\n";
  out << "agent " << to_string(ck.kind) << '\n';
  out << "seed " << ck.seed << '\n';
  out << "step " << ck.step << '\n';
  out << "topology " << topology_string(ck.model.topology()) << '\n';
  for (const auto& [k, v] : ck.metadata) out << "meta " << k << ' ' << v << '\n';
  const auto& layers = ck.model.layers();
  out << "layers " << layers.size() << '\n';
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    out << "layer " << i << ' ' << l.out() << ' ' << l.in() << ' ' << to_string(l.activation) << '\n';
    out << "weight";
    for (int r = 0; r < l.out(); ++r) {
      for (int c = 0; c < l.in(); ++c) {
        out << ' ';
        detail::write_float(out, l.weight(r, c));
      }
    }
    out << "\nbias";
    for (int r = 0; r < l.out(); ++r) {
      out << ' ';
      detail::write_float(out, l.bias(r));
    }
    out << '\n';
  }
  out << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint ck;
  std::istringstream rest;
  std::string line;
  if (!std::getline(in, line) || line != "usvnav-checkpoint 1") throw CheckpointError("not a usvnav checkpoint");
  detail::expect_line(in, "agent", rest);
  std::string kind;
  rest >> kind;
  try {
    ck.kind = agent_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(e.what());
  }
  detail::expect_line(in, "seed", rest);
  rest >> ck.seed;
  detail::expect_line(in, "step", rest);
  rest >> ck.step;
  detail::expect_line(in, "topology", rest);
  const Topology topo = parse_topology(rest);

  std::size_t count = 0;
  while (std::getline(in, line)) {
    std::istringstream s(line);
    std::string head;
    s >> head;
    if (head == "meta") {
      std::string k, v;
      s >> k;
      std::getline(s >> std::ws, v);
      ck.metadata[k] = v;
    } else if (head == "layers") {
      s >> count;
      break;
    } else {
      throw CheckpointError("unexpected line in checkpoint header: " + head);
    }
  }

  std::vector<Dense<float>> layers;
  for (std::size_t i = 0; i < count; ++i) {
    detail::expect_line(in, "layer", rest);
    std::size_t idx = 0;
    int out = 0, inp = 0;
    std::string act;
    rest >> idx >> out >> inp >> act;
    if (idx != i || out <= 0 || inp <= 0) throw CheckpointError("bad layer header " + std::to_string(i));
    Dense<float> l(inp, out, act == "relu" ? Activation::relu : Activation::identity);
    if (act != "relu" && act != "identity") throw CheckpointError("unknown activation: " + act);
    detail::expect_line(in, "weight", rest);
    std::string tok;
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < inp; ++c) {
        if (!(rest >> tok)) throw CheckpointError("too few weights in layer " + std::to_string(i));
        l.weight(r, c) = detail::parse_float(tok);
      }
    }
    if (rest >> tok) throw CheckpointError("too many weights in layer " + std::to_string(i));
    detail::expect_line(in, "bias", rest);
    for (int r = 0; r < out; ++r) {
      if (!(rest >> tok)) throw CheckpointError("too few biases in layer " + std::to_string(i));
      l.bias(r) = detail::parse_float(tok);
    }
    if (rest >> tok) throw CheckpointError("too many biases in layer " + std::to_string(i));
    layers.push_back(std::move(l));
  }
  if (!std::getline(in, line) || line != "end") throw CheckpointError("checkpoint missing 'end'");
  try {
    ck.model = Model<float>::from_layers(ck.kind, topo, std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(e.what());
  }
  return ck;
}

/// Writes via a temporary file and rename so a crash never leaves a torn checkpoint.
inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp.string());
    write_checkpoint(out, ck);
    out.flush();
    if (!out) throw std::runtime_error("failed writing checkpoint: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  return read_checkpoint(in);
}

}  // namespace usvnav::nn
