#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bsg {

/// Hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

/// Append-only log of submitted predictions. Each entry stores its payload and
/// checksum = SHA-256(previous checksum || payload), the first entry chaining
/// from kGenesis.
class Ledger {
 public:
  struct Entry {
    std::string payload;
    std::string checksum;
  };

  static const std::string kGenesis;

  Ledger() = default;
  /// Rebuilds a ledger from stored entries without re-deriving checksums, so
  /// tampered input stays tampered until verify_ledger inspects it.
  static Ledger from_entries(std::vector<Entry> entries);

  const Entry& append(std::string payload);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  /// Checksum of the last entry, or kGenesis when empty.
  const std::string& root() const;

 private:
  std::vector<Entry> entries_;
};

struct LedgerVerification {
  bool ok = true;
  std::optional<std::size_t> first_bad_index;
};

/// Replays the checksum chain; reports the first entry whose checksum fails.
LedgerVerification verify_ledger(const Ledger& ledger);
/// Also requires the chain to end at `expected_root`, which catches truncation
/// of trailing entries (reported at index size()).
LedgerVerification verify_ledger(const Ledger& ledger, const std::string& expected_root);

}  // namespace bsg
