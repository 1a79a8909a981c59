#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kolmo {

// A finite binary string. Ordering is length-lexicographic, which is also the
// order of the string <-> natural number bijection (e <-> 0, 0 <-> 1, 1 <-> 2,
// 00 <-> 3, ...).
class BitString {
 public:
  BitString() = default;

  // Parses '0'/'1' characters. Throws UsageError on anything else.
  static BitString parse(std::string_view text);
  static BitString from_index(std::uint64_t index);
  // The low `length` bits of `word`, most significant first.
  static BitString from_word(std::uint64_t word, unsigned length);
  static BitString zeros(std::size_t length);

  // Position in length-lex order. Requires size() <= 63.
  std::uint64_t index() const;
  // Packed value, most significant bit first. Requires size() <= 64.
  std::uint64_t word() const;

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] == '1'; }

  void push_back(bool bit) { bits_.push_back(bit ? '1' : '0'); }
  void append(const BitString& other) { bits_ += other.bits_; }
  BitString prefix(std::size_t length) const;
  BitString substr(std::size_t pos, std::size_t length) const;
  BitString complement() const;

  // '0'/'1' characters; the empty string renders as "".
  const std::string& str() const { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.bits_.size() <=> b.bits_.size(); c != 0) return c;
    return a.bits_.compare(b.bits_) <=> 0;
  }

 private:
  explicit BitString(std::string bits) : bits_(std::move(bits)) {}
  std::string bits_;
};

inline BitString operator+(BitString a, const BitString& b) {
  a.append(b);
  return a;
}

// Number of strings of length <= n, i.e. 2^(n+1) - 1.
std::uint64_t count_up_to(unsigned n);
// Index of the first string of length n, i.e. 2^n - 1.
std::uint64_t first_index_of_length(unsigned n);

// Self-delimiting code: every bit doubled, then "01".
BitString self_delimit(const BitString& s);
// Reads one self-delimited string starting at `pos`; advances `pos`. Returns
// false (leaving pos untouched) if the input there is not a complete code.
bool read_self_delimited(const BitString& s, std::size_t& pos, BitString& out);

// Pairing of two strings: self_delimit(a) followed by b.
BitString pair(const BitString& a, const BitString& b);

// Finite-support sequences of strings. Positions not listed are empty.
struct SupportEntry {
  std::uint64_t position;
  BitString term;
  friend bool operator==(const SupportEntry&, const SupportEntry&) = default;
};
using FiniteSequence = std::vector<SupportEntry>;  // sorted by position, terms nonempty

// Encodes as concatenated records self_delimit(index string) self_delimit(term).
BitString encode_sequence(const FiniteSequence& seq);
// Total decoding: reads records while they are well formed and ignores the
// rest; later records for the same position overwrite earlier ones; empty
// terms are dropped. decode_sequence(encode_sequence(s)) == s.
FiniteSequence decode_sequence(const BitString& s);
// Term at `position` (empty if unspecified).
BitString sequence_term(const FiniteSequence& seq, std::uint64_t position);

}  // namespace kolmo
