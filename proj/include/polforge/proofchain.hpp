#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polforge/dataset.hpp"
#include "polforge/sha256.hpp"
#include "polforge/tinytrain.hpp"
#include "polforge/types.hpp"

namespace polforge::proofchain {

/// One training step's log entry. The checkpoint is present exactly when
/// step is a multiple of the proof's checkpoint interval k.
struct ProofRecord {
  std::int64_t step = 0;
  std::optional<Vector> checkpoint;
  std::vector<Index> batch_indices;
  Digest batch_hash{};
  StepMetadata metadata;
};

/// A training proof: per-step records for steps 0..T-1 plus the final
/// weights, which double as the checkpoint at step T. Checkpoints therefore
/// exist at steps 0, k, 2k, ..., T. steps_per_epoch is auxiliary metadata
/// used by per-epoch update selection.
struct Proof {
  Architecture arch;
  std::int32_t k = 1;
  std::int64_t total_steps = 0;
  std::int32_t steps_per_epoch = 0;
  std::vector<ProofRecord> records;
  Vector final_weights;

  std::int64_t epochs() const { return total_steps / steps_per_epoch; }
  std::int64_t checkpoint_count() const { return total_steps / k + 1; }

  /// Checkpoint weights at step t (t % k == 0, 0 <= t <= total_steps).
  const Vector& checkpoint_at(std::int64_t t) const;
  ModelState state_at(std::int64_t t) const { return ModelState{checkpoint_at(t), arch}; }

  void validate() const;
};

/// Canonical encoding of one committed row: index (u64 LE), feature count
/// (u64 LE), features (binary64 LE), label (i64 LE). A batch commitment is
/// the SHA-256 of the concatenated row encodings; the empty selection hashes
/// the empty byte string.
void append_row_bytes(std::vector<std::uint8_t>& out, Index index, const Vector& features, int label);
Digest hash_rows(const std::vector<Index>& indices, const std::vector<DataRow>& rows);
Digest hash_batch(const Dataset& data, const std::vector<Index>& indices);

/// Binary proof format: magic "POL1", version 1, architecture block, k, T,
/// steps per epoch, then records in step order, then the final weights.
/// All integers and binary64 weights little-endian.
std::vector<std::uint8_t> serialize(const Proof& proof);
Proof deserialize(std::span<const std::uint8_t> bytes);

void save_proof(const Proof& proof, const std::filesystem::path& path);
Proof load_proof(const std::filesystem::path& path);

/// Running hash over the serialized header and records:
/// H_0 = H(header), H_i = H(H_{i-1} || record_i), final = H(H_last || final block).
Digest chain_digest(const Proof& proof);

/// Assemble a proof from a finished training run.
Proof build_proof(const tinytrain::TrainResult& run, const Dataset& data, int k);

struct CommitmentEntry {
  Digest proof_digest{};
  std::int64_t timestamp = 0;
  std::string label;
};

/// Append-only record of committed proof digests with timestamps.
class CommitmentLedger {
 public:
  const std::vector<CommitmentEntry>& entries() const { return entries_; }

  const CommitmentEntry& append(const Digest& digest, std::int64_t timestamp, std::string label);
  bool contains(const Digest& digest) const;

  /// Text format: one `hex(digest) <tab> unix_seconds <tab> label` per line.
  void save(const std::filesystem::path& path) const;
  static CommitmentLedger load(const std::filesystem::path& path);

 private:
  std::vector<CommitmentEntry> entries_;
};

const CommitmentEntry& commit(CommitmentLedger& ledger, const Proof& proof, std::int64_t now,
                              std::string label);
bool detect_replay(const CommitmentLedger& ledger, const Proof& proof);

/// Fetch the batch committed at `step` from the provider and verify its hash
/// against the record. Throws CommitmentError on mismatch and
/// AvailabilityError when the provider lacks a row.
Batch fetch_and_check_batch(const Proof& proof, std::int64_t step, const DatasetProvider& provider);

}  // namespace polforge::proofchain
