#include "maze/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace maze {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw CheckpointError("cannot open for writing: " + path);
  }

  void bytes(const void* data, size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      hash_ ^= b[i];
      hash_ *= kFnvPrime;
    }
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void i32(std::int32_t v) { bytes(&v, 4); }
  void i64(std::int64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void str(const std::string& s) {
    i64(static_cast<std::int64_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void doubles(const std::vector<double>& v) {
    i64(static_cast<std::int64_t>(v.size()));
    bytes(v.data(), v.size() * sizeof(double));
  }
  void finish() {
    const std::uint64_t h = hash_;
    out_.write(reinterpret_cast<const char*>(&h), 8);
    out_.close();
    if (!out_) throw CheckpointError("write failure");
  }

 private:
  std::ofstream out_;
  std::uint64_t hash_ = kFnvOffset;
};

class Reader {
 public:
  explicit Reader(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    buf_ = ss.str();
    if (buf_.size() < 8) throw CheckpointError("checkpoint truncated: " + path);
    std::uint64_t stored;
    std::memcpy(&stored, buf_.data() + buf_.size() - 8, 8);
    std::uint64_t hash = kFnvOffset;
    for (size_t i = 0; i + 8 < buf_.size(); ++i) {
      hash ^= static_cast<unsigned char>(buf_[i]);
      hash *= kFnvPrime;
    }
    if (hash != stored)
      throw CheckpointError("checkpoint integrity check failed: " + path);
    end_ = buf_.size() - 8;
  }

  void bytes(void* data, size_t n) {
    if (pos_ + n > end_) throw CheckpointError("checkpoint truncated");
    std::memcpy(data, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::int32_t i32() {
    std::int32_t v;
    bytes(&v, 4);
    return v;
  }
  std::int64_t i64() {
    std::int64_t v;
    bytes(&v, 8);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    const auto n = i64();
    if (n < 0 || pos_ + static_cast<size_t>(n) > end_)
      throw CheckpointError("corrupt string field");
    std::string s(buf_.data() + pos_, static_cast<size_t>(n));
    pos_ += static_cast<size_t>(n);
    return s;
  }
  std::vector<double> doubles() {
    const auto n = i64();
    if (n < 0 || pos_ + static_cast<size_t>(n) * 8 > end_)
      throw CheckpointError("corrupt array field");
    std::vector<double> v(static_cast<size_t>(n));
    bytes(v.data(), v.size() * sizeof(double));
    return v;
  }
  void done() const {
    if (pos_ != end_) throw CheckpointError("trailing bytes in checkpoint");
  }

 private:
  std::string buf_;
  size_t pos_ = 0;
  size_t end_ = 0;
};

constexpr char kPolicyMagic[8] = {'M', 'Z', 'P', 'O', 'L', 'C', 'Y', '1'};
constexpr char kStateMagic[8] = {'M', 'Z', 'S', 'T', 'A', 'T', 'E', '1'};

void write_policy_fields(Writer& w, const PolicyParams& p) {
  w.u8(static_cast<std::uint8_t>(p.role));
  w.str(p.lineage);
  w.i64(p.train_steps);
  w.i32(p.arch.input_dim);
  w.i32(static_cast<std::int32_t>(p.arch.hidden.size()));
  for (int h : p.arch.hidden) w.i32(h);
  w.doubles(p.w);
}

PolicyParams read_policy_fields(Reader& r) {
  PolicyParams p;
  p.role = static_cast<Role>(r.u8());
  p.lineage = r.str();
  p.train_steps = r.i64();
  p.arch.input_dim = r.i32();
  const int nh = r.i32();
  p.arch.hidden.clear();
  for (int i = 0; i < nh; ++i) p.arch.hidden.push_back(r.i32());
  p.w = r.doubles();
  if (static_cast<int>(p.w.size()) != p.arch.param_count())
    throw CheckpointError("parameter count does not match architecture");
  return p;
}

void write_adam(Writer& w, const AdamState& a) {
  w.doubles(a.m);
  w.doubles(a.v);
  w.i64(a.t);
}

AdamState read_adam(Reader& r) {
  AdamState a;
  a.m = r.doubles();
  a.v = r.doubles();
  a.t = r.i64();
  return a;
}

}  // namespace

void save_policy(const PolicyParams& params, const std::string& path) {
  Writer w(path);
  w.bytes(kPolicyMagic, 8);
  write_policy_fields(w, params);
  w.finish();
}

PolicyParams load_policy(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kPolicyMagic, 8) != 0)
    throw CheckpointError("not a policy checkpoint: " + path);
  PolicyParams p = read_policy_fields(r);
  r.done();
  return p;
}

void save_train_state(const TrainState& state, const std::string& path) {
  Writer w(path);
  w.bytes(kStateMagic, 8);
  w.i32(state.generation);
  std::ostringstream rng;
  state.master.save(rng);
  w.str(rng.str());

  for (const Population* pop : {&state.P, &state.Q}) {
    w.u8(static_cast<std::uint8_t>(pop->role));
    w.i32(pop->size());
    const auto& adams = pop == &state.P ? state.adam_p : state.adam_q;
    for (int i = 0; i < pop->size(); ++i) {
      write_policy_fields(w, pop->members[i]);
      write_adam(w, adams[i]);
    }
  }

  w.i32(state.archive.capacity);
  w.f64(state.archive.distance_threshold);
  w.i64(state.archive.next_insert_id);
  w.i32(static_cast<std::int32_t>(state.archive.entries.size()));
  for (const auto& e : state.archive.entries) {
    write_policy_fields(w, e.partner);
    w.doubles(e.behavior);
    w.i64(e.inserted_at);
  }
  w.finish();
}

TrainState load_train_state(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kStateMagic, 8) != 0)
    throw CheckpointError("not a run-state checkpoint: " + path);

  TrainState state;
  state.generation = r.i32();
  std::istringstream rng(r.str());
  state.master.load(rng);

  for (Population* pop : {&state.P, &state.Q}) {
    pop->role = static_cast<Role>(r.u8());
    const int n = r.i32();
    auto& adams = pop == &state.P ? state.adam_p : state.adam_q;
    for (int i = 0; i < n; ++i) {
      pop->members.push_back(read_policy_fields(r));
      adams.push_back(read_adam(r));
    }
  }

  state.archive.capacity = r.i32();
  state.archive.distance_threshold = r.f64();
  state.archive.next_insert_id = r.i64();
  const int ne = r.i32();
  for (int i = 0; i < ne; ++i) {
    ArchiveEntry e;
    e.partner = read_policy_fields(r);
    e.behavior = r.doubles();
    e.inserted_at = r.i64();
    state.archive.entries.push_back(std::move(e));
  }
  r.done();
  return state;
}

void append_metrics_row(const std::filesystem::path& csv,
                        const GenerationMetrics& m) {
  const bool fresh = !std::filesystem::exists(csv);
  std::ofstream out(csv, std::ios::app);
  if (!out) throw CheckpointError("cannot write metrics: " + csv.string());
  if (fresh) {
    out << "generation,train_sparse_mean,train_shaped_mean,eval_sparse_mean,"
           "agent_jsd,partner_jsd,shaped_coef,env_steps_per_member\n";
  }
  char line[256];
  std::snprintf(line, sizeof(line), "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%ld\n",
                m.generation, m.train_sparse_mean, m.train_shaped_mean,
                m.eval_sparse_mean, m.agent_jsd, m.partner_jsd, m.shaped_coef,
                m.env_steps_per_member);
  out << line;
}

DirectorySink::DirectorySink(std::filesystem::path dir,
                             bool per_generation_checkpoints)
    : dir_(std::move(dir)),
      per_generation_checkpoints_(per_generation_checkpoints) {
  std::filesystem::create_directories(dir_);
}

void DirectorySink::on_generation(const TrainState& state,
                                  const GenerationMetrics& metrics) {
  append_metrics_row(dir_ / "metrics.csv", metrics);
  save_train_state(state, (dir_ / "checkpoint.bin").string());

  if (!per_generation_checkpoints_) return;
  const auto gen_dir = dir_ / ("gen_" + std::to_string(metrics.generation));
  std::filesystem::create_directories(gen_dir);
  for (int i = 0; i < state.P.size(); ++i) {
    save_policy(state.P.members[i],
                (gen_dir / ("p" + std::to_string(i) + ".ckpt")).string());
  }
  for (int i = 0; i < state.Q.size(); ++i) {
    save_policy(state.Q.members[i],
                (gen_dir / ("q" + std::to_string(i) + ".ckpt")).string());
  }
  std::ofstream manifest(gen_dir / "archive.manifest");
  manifest << "# id inserted_at behavior...\n";
  for (size_t i = 0; i < state.archive.entries.size(); ++i) {
    const auto& e = state.archive.entries[i];
    manifest << i << ' ' << e.inserted_at;
    char num[64];
    for (double b : e.behavior) {
      std::snprintf(num, sizeof(num), " %.10g", b);
      manifest << num;
    }
    manifest << ' ' << e.partner.lineage << '\n';
  }
}

}  // namespace maze
