#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srvscan {

// Identifies one AST node within a unit. 0 is reserved as "no node".
using NodeId = std::uint32_t;
inline constexpr NodeId k_no_node = 0;

struct SourceSpan {
  std::string file;
  std::uint32_t line = 0;    // 1-based
  std::uint32_t column = 0;  // 1-based
  std::size_t offset = 0;    // byte offset into the source text
  std::size_t length = 0;
};

// ---------------------------------------------------------------------------
// SRV classes

enum class SrvType { XCra, XPra, Casr, Ssmi, Sma };

inline const std::array<SrvType, 5>& all_srv_types() {
  static const std::array<SrvType, 5> kAll = {SrvType::XCra, SrvType::XPra,
                                              SrvType::Casr, SrvType::Ssmi,
                                              SrvType::Sma};
  return kAll;
}

inline std::string_view srv_name(SrvType t) {
  switch (t) {
    case SrvType::XCra: return "X-CRA";
    case SrvType::XPra: return "X-PRA";
    case SrvType::Casr: return "CASR";
    case SrvType::Ssmi: return "SSMI";
    case SrvType::Sma: return "SMA";
  }
  return "?";
}

inline std::optional<SrvType> srv_from_name(std::string_view s) {
  for (SrvType t : all_srv_types())
    if (srv_name(t) == s) return t;
  // tolerate the un-hyphenated spellings
  if (s == "XCRA") return SrvType::XCra;
  if (s == "XPRA") return SrvType::XPra;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Environment atoms (closed set)

enum class Atom {
  MsgSender,
  MsgValue,
  MsgData,
  BlockChainid,
  BlockTimestamp,
  AddressThis,
  TxOrigin,
};

inline std::string_view atom_name(Atom a) {
  switch (a) {
    case Atom::MsgSender: return "msg.sender";
    case Atom::MsgValue: return "msg.value";
    case Atom::MsgData: return "msg.data";
    case Atom::BlockChainid: return "block.chainid";
    case Atom::BlockTimestamp: return "block.timestamp";
    case Atom::AddressThis: return "address(this)";
    case Atom::TxOrigin: return "tx.origin";
  }
  return "?";
}

inline std::optional<Atom> atom_from_name(std::string_view s) {
  for (Atom a : {Atom::MsgSender, Atom::MsgValue, Atom::MsgData,
                 Atom::BlockChainid, Atom::BlockTimestamp, Atom::AddressThis,
                 Atom::TxOrigin})
    if (atom_name(a) == s) return a;
  return std::nullopt;
}

inline bool is_atom_name(std::string_view s) {
  return atom_from_name(s).has_value();
}

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  std::uint32_t line, column;
  ParseError(std::string msg, std::uint32_t l, std::uint32_t c)
      : Error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)),
        line(l),
        column(c) {}
};

struct CycleError : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct OracleUnavailable : Error { using Error::Error; };
struct MalformedResponse : Error { using Error::Error; };
struct ReplayMiss : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };
struct PathNotFound : Error { using Error::Error; };
struct HttpError : Error { using Error::Error; };
struct NotVerified : Error { using Error::Error; };
struct RateLimited : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// 256-bit unsigned values. Only parsing and comparison are needed: detector
// rules compare literals against curve-order constants, never do arithmetic.

struct U256 {
  std::array<std::uint64_t, 4> limbs{};  // little-endian

  friend bool operator==(const U256&, const U256&) = default;
  friend auto operator<=>(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i)
      if (a.limbs[i] != b.limbs[i]) return a.limbs[i] <=> b.limbs[i];
    return std::strong_ordering::equal;
  }

  bool is_zero() const {
    return limbs[0] == 0 && limbs[1] == 0 && limbs[2] == 0 && limbs[3] == 0;
  }

  static U256 from_u64(std::uint64_t v) {
    U256 r;
    r.limbs[0] = v;
    return r;
  }

  // Accepts decimal or 0x-prefixed hex, with optional '_' separators.
  // Returns nullopt on malformed input or overflow past 256 bits.
  static std::optional<U256> parse(std::string_view text);

  std::string to_hex() const;

  // floor(n / 2) of the secp256k1 group order n.
  static const U256& secp256k1_half_order() {
    static const U256 k = *parse(
        "0x7FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFF5D576E7357A4501DDFE92F46681B20A0");
    return k;
  }
};

namespace detail {
inline bool u256_mul10_add(U256& v, unsigned digit) {
  unsigned __int128 carry = digit;
  for (int i = 0; i < 4; ++i) {
    unsigned __int128 cur = static_cast<unsigned __int128>(v.limbs[i]) * 10 + carry;
    v.limbs[i] = static_cast<std::uint64_t>(cur);
    carry = cur >> 64;
  }
  return carry == 0;
}
}  // namespace detail

inline std::optional<U256> U256::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != '_') s.push_back(c);
  if (s.empty()) return std::nullopt;
  U256 v;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    std::string_view hex = std::string_view(s).substr(2);
    if (hex.empty() || hex.size() > 64) return std::nullopt;
    int bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, bit += 4) {
      char c = *it;
      std::uint64_t d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = 10 + c - 'a';
      else if (c >= 'A' && c <= 'F') d = 10 + c - 'A';
      else return std::nullopt;
      v.limbs[bit / 64] |= d << (bit % 64);
    }
    return v;
  }
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    if (!detail::u256_mul10_add(v, static_cast<unsigned>(c - '0')))
      return std::nullopt;
  }
  return v;
}

inline std::string U256::to_hex() const {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  bool started = false;
  for (int i = 3; i >= 0; --i) {
    for (int nib = 15; nib >= 0; --nib) {
      unsigned d = (limbs[i] >> (nib * 4)) & 0xF;
      if (d != 0) started = true;
      if (started) out.push_back(kDigits[d]);
    }
  }
  if (!started) out = "0";
  return "0x" + out;
}

// ---------------------------------------------------------------------------
// Content digests (FNV-1a, 64-bit). Used as transcript keys; not cryptographic.

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_hex(std::string_view data) {
  static const char* kDigits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  // fold in the length so that prefix-collisions differ
  h = fnv1a64(std::to_string(data.size()), h);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace srvscan
