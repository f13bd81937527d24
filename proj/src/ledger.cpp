#include "bsg/ledger.hpp"

#include <array>
#include <cstdio>

#include <openssl/sha.h>

namespace bsg {

const std::string Ledger::kGenesis(64, '0');

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest.size());
  for (const auto b : digest) {
    out += kHex[b >> 4];
    out += kHex[b & 0x0F];
  }
  return out;
}

Ledger Ledger::from_entries(std::vector<Entry> entries) {
  Ledger l;
  l.entries_ = std::move(entries);
  return l;
}

const Ledger::Entry& Ledger::append(std::string payload) {
  auto checksum = sha256_hex(root() + payload);
  entries_.push_back({std::move(payload), std::move(checksum)});
  return entries_.back();
}

const std::string& Ledger::root() const { return entries_.empty() ? kGenesis : entries_.back().checksum; }

LedgerVerification verify_ledger(const Ledger& ledger) {
  std::string previous = Ledger::kGenesis;
  const auto& entries = ledger.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (sha256_hex(previous + entries[i].payload) != entries[i].checksum) return {false, i};
    previous = entries[i].checksum;
  }
  return {};
}

LedgerVerification verify_ledger(const Ledger& ledger, const std::string& expected_root) {
  auto result = verify_ledger(ledger);
  if (result.ok && ledger.root() != expected_root) return {false, ledger.size()};
  return result;
}

}  // namespace bsg
