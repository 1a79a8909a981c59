#include "kolmo/bits.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "kolmo/error.hpp"

namespace kolmo {

BitString BitString::parse(std::string_view text) {
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw UsageError("bit string may contain only '0' and '1': '" + std::string(text) + "'");
    }
  }
  return BitString(std::string(text));
}

BitString BitString::from_index(std::uint64_t index) {
  const std::uint64_t shifted = index + 1;
  const unsigned length = static_cast<unsigned>(std::bit_width(shifted) - 1);
  const std::uint64_t value = shifted - (std::uint64_t{1} << length);
  return from_word(value, length);
}

BitString BitString::from_word(std::uint64_t word, unsigned length) {
  std::string bits(length, '0');
  for (unsigned i = 0; i < length; ++i) {
    if ((word >> (length - 1 - i)) & 1U) bits[i] = '1';
  }
  return BitString(std::move(bits));
}

BitString BitString::zeros(std::size_t length) { return BitString(std::string(length, '0')); }

std::uint64_t BitString::index() const {
  if (bits_.size() > 63) throw UsageError("string too long for a length-lex index");
  return first_index_of_length(static_cast<unsigned>(bits_.size())) + word();
}

std::uint64_t BitString::word() const {
  if (bits_.size() > 64) throw UsageError("string too long to pack into 64 bits");
  std::uint64_t w = 0;
  for (char c : bits_) w = (w << 1) | (c == '1' ? 1U : 0U);
  return w;
}

BitString BitString::prefix(std::size_t length) const {
  return BitString(bits_.substr(0, std::min(length, bits_.size())));
}

BitString BitString::substr(std::size_t pos, std::size_t length) const {
  if (pos > bits_.size()) return BitString();
  return BitString(bits_.substr(pos, length));
}

BitString BitString::complement() const {
  std::string out = bits_;
  for (char& c : out) c = (c == '0') ? '1' : '0';
  return BitString(std::move(out));
}

std::uint64_t count_up_to(unsigned n) { return (std::uint64_t{1} << (n + 1)) - 1; }

std::uint64_t first_index_of_length(unsigned n) { return (std::uint64_t{1} << n) - 1; }

BitString self_delimit(const BitString& s) {
  BitString out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back(s[i]);
    out.push_back(s[i]);
  }
  out.push_back(false);
  out.push_back(true);
  return out;
}

bool read_self_delimited(const BitString& s, std::size_t& pos, BitString& out) {
  BitString acc;
  std::size_t i = pos;
  while (i + 1 < s.size()) {
    const bool a = s[i];
    const bool b = s[i + 1];
    i += 2;
    if (a == b) {
      acc.push_back(a);
    } else if (!a && b) {
      pos = i;
      out = std::move(acc);
      return true;
    } else {
      return false;  // "10" is not a codeword
    }
  }
  return false;
}

BitString pair(const BitString& a, const BitString& b) { return self_delimit(a) + b; }

BitString encode_sequence(const FiniteSequence& seq) {
  BitString out;
  for (const auto& e : seq) {
    if (e.term.empty()) continue;
    out.append(self_delimit(BitString::from_index(e.position)));
    out.append(self_delimit(e.term));
  }
  return out;
}

FiniteSequence decode_sequence(const BitString& s) {
  std::map<std::uint64_t, BitString> terms;
  std::size_t pos = 0;
  while (pos < s.size()) {
    BitString index_str;
    BitString term;
    std::size_t probe = pos;
    if (!read_self_delimited(s, probe, index_str)) break;
    if (!read_self_delimited(s, probe, term)) break;
    pos = probe;
    if (index_str.size() > 63) continue;
    terms[index_str.index()] = std::move(term);
  }
  FiniteSequence out;
  for (auto& [position, term] : terms) {
    if (!term.empty()) out.push_back({position, std::move(term)});
  }
  return out;
}

BitString sequence_term(const FiniteSequence& seq, std::uint64_t position) {
  auto it = std::lower_bound(seq.begin(), seq.end(), position,
                             [](const SupportEntry& e, std::uint64_t p) { return e.position < p; });
  if (it != seq.end() && it->position == position) return it->term;
  return BitString();
}

}  // namespace kolmo
