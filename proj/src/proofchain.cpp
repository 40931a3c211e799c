#include "polforge/proofchain.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace polforge::proofchain {

static_assert(std::endian::native == std::endian::little,
              "proof serialization assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'P', 'O', 'L', '1'};
constexpr std::uint8_t kVersion = 1;

void put_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
  const auto* b = static_cast<const std::uint8_t*>(p);
  out.insert(out.end(), b, b + n);
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  put_bytes(out, &v, sizeof(v));
}

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;

  void need(std::size_t n, const char* what) const {
    if (offset + n > bytes.size()) {
      throw FormatError(std::string("truncated proof while reading ") + what, offset);
    }
  }

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes.data() + offset, sizeof(T));
    offset += sizeof(T);
    return v;
  }

  void get_raw(void* dst, std::size_t n, const char* what) {
    need(n, what);
    std::memcpy(dst, bytes.data() + offset, n);
    offset += n;
  }
};

void encode_header(std::vector<std::uint8_t>& out, const Proof& p) {
  put_bytes(out, kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, static_cast<std::uint8_t>(p.arch.activation));
  put(out, static_cast<std::uint32_t>(p.arch.layer_sizes.size()));
  for (int s : p.arch.layer_sizes) put(out, static_cast<std::uint32_t>(s));
  put(out, static_cast<std::uint32_t>(p.k));
  put(out, static_cast<std::uint64_t>(p.total_steps));
  put(out, static_cast<std::uint32_t>(p.steps_per_epoch));
}

void encode_record(std::vector<std::uint8_t>& out, const ProofRecord& r) {
  put(out, static_cast<std::uint64_t>(r.step));
  put(out, static_cast<std::uint8_t>(r.checkpoint.has_value() ? 1 : 0));
  if (r.checkpoint.has_value()) {
    put(out, static_cast<std::uint64_t>(r.checkpoint->size()));
    put_bytes(out, r.checkpoint->data(), sizeof(double) * static_cast<std::size_t>(r.checkpoint->size()));
  }
  put(out, static_cast<std::uint32_t>(r.batch_indices.size()));
  for (Index i : r.batch_indices) put(out, static_cast<std::uint64_t>(i));
  put_bytes(out, r.batch_hash.data(), r.batch_hash.size());
  put(out, r.metadata.learning_rate);
  put(out, static_cast<std::uint32_t>(r.metadata.batch_size));
  put(out, static_cast<std::uint8_t>(r.metadata.optimizer));
  put(out, r.metadata.seed);
}

void encode_final(std::vector<std::uint8_t>& out, const Proof& p) {
  put(out, static_cast<std::uint64_t>(p.final_weights.size()));
  put_bytes(out, p.final_weights.data(), sizeof(double) * static_cast<std::size_t>(p.final_weights.size()));
}

}  // namespace

const Vector& Proof::checkpoint_at(std::int64_t t) const {
  if (t < 0 || t > total_steps || t % k != 0) {
    throw ProofError("no checkpoint at step " + std::to_string(t));
  }
  if (t == total_steps) return final_weights;
  const auto& r = records.at(static_cast<std::size_t>(t));
  if (!r.checkpoint.has_value()) throw ProofError("missing checkpoint at step " + std::to_string(t));
  return *r.checkpoint;
}

void Proof::validate() const {
  arch.validate();
  if (k < 1) throw ProofError("checkpoint interval k must be >= 1");
  if (total_steps < 1) throw ProofError("proof must contain at least one step");
  if (records.empty()) throw ProofError("proof has no records");
  if (static_cast<std::int64_t>(records.size()) != total_steps) {
    throw ProofError("record count does not match total steps");
  }
  if (total_steps % k != 0) throw ProofError("total steps must be a multiple of k");
  if (steps_per_epoch < 1 || total_steps % steps_per_epoch != 0) {
    throw ProofError("total steps must be a whole number of epochs");
  }
  if (steps_per_epoch % k != 0) throw ProofError("steps per epoch must be a multiple of k");

  const Index n = arch.parameter_count();
  if (final_weights.size() != n) throw ProofError("final weights length does not match architecture");
  if (!final_weights.allFinite()) throw ProofError("final weights contain NaN or Inf");

  std::int64_t prev = -1;
  for (const auto& r : records) {
    if (r.step <= prev) throw ProofError("record steps must be strictly increasing");
    prev = r.step;
    const bool want_ckpt = (r.step % k == 0);
    if (want_ckpt != r.checkpoint.has_value()) {
      throw ProofError("checkpoint presence mismatch at step " + std::to_string(r.step));
    }
    if (r.checkpoint.has_value()) {
      if (r.checkpoint->size() != n) throw ProofError("checkpoint length mismatch at step " + std::to_string(r.step));
      if (!r.checkpoint->allFinite()) throw ProofError("checkpoint contains NaN or Inf at step " + std::to_string(r.step));
    }
    if (!(r.metadata.learning_rate > 0.0)) {
      throw ProofError("record metadata must carry a positive learning rate (step " +
                       std::to_string(r.step) + ")");
    }
  }
  if (records.front().step != 0) throw ProofError("records must start at step 0");
}

void append_row_bytes(std::vector<std::uint8_t>& out, Index index, const Vector& features, int label) {
  put(out, static_cast<std::uint64_t>(index));
  put(out, static_cast<std::uint64_t>(features.size()));
  put_bytes(out, features.data(), sizeof(double) * static_cast<std::size_t>(features.size()));
  put(out, static_cast<std::int64_t>(label));
}

Digest hash_rows(const std::vector<Index>& indices, const std::vector<DataRow>& rows) {
  if (indices.size() != rows.size()) throw ShapeError("hash_rows: index/row count mismatch");
  std::vector<std::uint8_t> bytes;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    append_row_bytes(bytes, indices[i], rows[i].features, rows[i].label);
  }
  return sha256(bytes);
}

Digest hash_batch(const Dataset& data, const std::vector<Index>& indices) {
  std::vector<DataRow> rows;
  rows.reserve(indices.size());
  for (Index i : indices) rows.push_back(data.row(i));  // throws ReferenceError when out of range
  return hash_rows(indices, rows);
}

std::vector<std::uint8_t> serialize(const Proof& proof) {
  proof.validate();
  std::vector<std::uint8_t> out;
  encode_header(out, proof);
  for (const auto& r : proof.records) encode_record(out, r);
  encode_final(out, proof);
  return out;
}

Proof deserialize(std::span<const std::uint8_t> bytes) {
  Reader rd{bytes};

  char magic[4];
  rd.get_raw(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError("bad proof magic", 0);
  const auto version = rd.get<std::uint8_t>("version");
  if (version != kVersion) throw FormatError("unsupported proof version " + std::to_string(version), 4);

  Proof p;
  p.arch.activation = static_cast<Activation>(rd.get<std::uint8_t>("activation"));
  const auto depth = rd.get<std::uint32_t>("layer count");
  if (depth < 2 || depth > 64) throw FormatError("implausible layer count", rd.offset);
  p.arch.layer_sizes.resize(depth);
  for (auto& s : p.arch.layer_sizes) s = static_cast<int>(rd.get<std::uint32_t>("layer size"));
  p.k = static_cast<std::int32_t>(rd.get<std::uint32_t>("k"));
  p.total_steps = static_cast<std::int64_t>(rd.get<std::uint64_t>("total steps"));
  p.steps_per_epoch = static_cast<std::int32_t>(rd.get<std::uint32_t>("steps per epoch"));
  if (p.total_steps < 1 || p.total_steps > (1LL << 40)) {
    throw FormatError("implausible step count", rd.offset);
  }

  p.records.resize(static_cast<std::size_t>(p.total_steps));
  for (auto& r : p.records) {
    r.step = static_cast<std::int64_t>(rd.get<std::uint64_t>("record step"));
    const auto has_ckpt = rd.get<std::uint8_t>("checkpoint flag");
    if (has_ckpt != 0) {
      const auto n = rd.get<std::uint64_t>("checkpoint length");
      rd.need(sizeof(double) * n, "checkpoint weights");
      Vector w(static_cast<Eigen::Index>(n));
      rd.get_raw(w.data(), sizeof(double) * n, "checkpoint weights");
      r.checkpoint = std::move(w);
    }
    const auto bn = rd.get<std::uint32_t>("batch index count");
    r.batch_indices.resize(bn);
    for (auto& i : r.batch_indices) i = static_cast<Index>(rd.get<std::uint64_t>("batch index"));
    rd.get_raw(r.batch_hash.data(), r.batch_hash.size(), "batch hash");
    r.metadata.learning_rate = rd.get<double>("learning rate");
    r.metadata.batch_size = static_cast<std::int32_t>(rd.get<std::uint32_t>("batch size"));
    r.metadata.optimizer = static_cast<Optimizer>(rd.get<std::uint8_t>("optimizer"));
    r.metadata.seed = rd.get<std::uint64_t>("seed");
    r.metadata.step_index = r.step;
  }

  const auto n = rd.get<std::uint64_t>("final weight length");
  rd.need(sizeof(double) * n, "final weights");
  p.final_weights.resize(static_cast<Eigen::Index>(n));
  rd.get_raw(p.final_weights.data(), sizeof(double) * n, "final weights");

  if (rd.offset != bytes.size()) {
    throw FormatError("trailing bytes after proof payload", rd.offset);
  }
  p.validate();
  return p;
}

void save_proof(const Proof& proof, const std::filesystem::path& path) {
  const auto bytes = serialize(proof);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path.string());
}

Proof load_proof(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

Digest chain_digest(const Proof& proof) {
  proof.validate();
  std::vector<std::uint8_t> buf;
  encode_header(buf, proof);
  Digest h = sha256(buf);
  for (const auto& r : proof.records) {
    buf.clear();
    put_bytes(buf, h.data(), h.size());
    encode_record(buf, r);
    h = sha256(buf);
  }
  buf.clear();
  put_bytes(buf, h.data(), h.size());
  encode_final(buf, proof);
  return sha256(buf);
}

Proof build_proof(const tinytrain::TrainResult& run, const Dataset& data, int k) {
  const std::int64_t T = run.total_steps();
  if (T < 1) throw ProofError("cannot build a proof from an empty run");
  if (k < 1 || T % k != 0) {
    throw ProofError("checkpoint interval must divide the step count");
  }

  Proof p;
  p.arch = run.arch;
  p.k = k;
  p.total_steps = T;
  const std::int64_t s = tinytrain::steps_per_epoch(data.rows(),
                                                    run.metadata.front().batch_size);
  p.steps_per_epoch = static_cast<std::int32_t>(s);
  p.records.resize(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    auto& r = p.records[static_cast<std::size_t>(t)];
    r.step = t;
    if (t % k == 0) r.checkpoint = run.trajectory[static_cast<std::size_t>(t)];
    r.batch_indices = run.schedule[static_cast<std::size_t>(t)];
    r.batch_hash = hash_batch(data, r.batch_indices);
    r.metadata = run.metadata[static_cast<std::size_t>(t)];
  }
  p.final_weights = run.trajectory.back();
  p.validate();
  return p;
}

const CommitmentEntry& CommitmentLedger::append(const Digest& digest, std::int64_t timestamp,
                                                std::string label) {
  if (!entries_.empty() && timestamp < entries_.back().timestamp) {
    throw LedgerError("commitment timestamp regresses behind the last entry");
  }
  entries_.push_back(CommitmentEntry{digest, timestamp, std::move(label)});
  return entries_.back();
}

bool CommitmentLedger::contains(const Digest& digest) const {
  for (const auto& e : entries_) {
    if (e.proof_digest == digest) return true;
  }
  return false;
}

void CommitmentLedger::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& e : entries_) {
    f << to_hex(e.proof_digest) << '\t' << e.timestamp << '\t' << e.label << '\n';
  }
}

CommitmentLedger CommitmentLedger::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  CommitmentLedger ledger;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string hex, label;
    std::int64_t ts = 0;
    if (!std::getline(ss, hex, '\t')) throw FormatError("malformed ledger line");
    if (!(ss >> ts)) throw FormatError("malformed ledger timestamp");
    ss.get();  // tab
    std::getline(ss, label);
    ledger.entries_.push_back(CommitmentEntry{digest_from_hex(hex), ts, label});
  }
  return ledger;
}

const CommitmentEntry& commit(CommitmentLedger& ledger, const Proof& proof, std::int64_t now,
                              std::string label) {
  return ledger.append(chain_digest(proof), now, std::move(label));
}

bool detect_replay(const CommitmentLedger& ledger, const Proof& proof) {
  return ledger.contains(chain_digest(proof));
}

Batch fetch_and_check_batch(const Proof& proof, std::int64_t step, const DatasetProvider& provider) {
  if (step < 0 || step >= proof.total_steps) {
    throw ProofError("no record at step " + std::to_string(step));
  }
  const auto& rec = proof.records[static_cast<std::size_t>(step)];

  std::vector<DataRow> rows;
  rows.reserve(rec.batch_indices.size());
  for (Index i : rec.batch_indices) {
    auto r = provider.row(i);
    if (!r.has_value()) {
      throw AvailabilityError("provider cannot supply row " + std::to_string(i) +
                              " committed at step " + std::to_string(step));
    }
    rows.push_back(std::move(*r));
  }
  if (hash_rows(rec.batch_indices, rows) != rec.batch_hash) {
    throw CommitmentError("batch hash mismatch", step);
  }

  Batch b;
  b.indices = rec.batch_indices;
  const int dim = rows.empty() ? 0 : static_cast<int>(rows.front().features.size());
  b.features.resize(static_cast<Eigen::Index>(rows.size()), dim);
  b.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    b.features.row(static_cast<Eigen::Index>(r)) = rows[r].features.transpose();
    b.labels[static_cast<Eigen::Index>(r)] = rows[r].label;
  }
  return b;
}

}  // namespace polforge::proofchain
