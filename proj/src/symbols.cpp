#include "avgshadow/error.hpp"
#include "avgshadow/ifs.hpp"

namespace avgshadow {

SymbolStream SymbolStream::constant(Symbol s) { return {Kind::constant, {s}, 0, 0}; }

SymbolStream SymbolStream::periodic(SymbolWord word) {
  require(!word.empty(), ErrorCode::invalid_argument, "periodic stream needs a nonempty word");
  return {Kind::periodic, std::move(word), 0, 0};
}

SymbolStream SymbolStream::random(std::size_t alphabet, std::uint64_t seed) {
  require(alphabet >= 1, ErrorCode::invalid_argument, "random stream needs a nonempty alphabet");
  return {Kind::random, {}, alphabet, seed};
}

SymbolStream SymbolStream::explicit_list(SymbolWord word) {
  return {Kind::explicit_list, std::move(word), 0, 0};
}

Symbol SymbolStream::at(std::size_t n) const {
  switch (kind_) {
    case Kind::constant: return word_.front();
    case Kind::periodic: return word_[n % word_.size()];
    case Kind::explicit_list:
      require(n < word_.size(), ErrorCode::invalid_argument,
              "explicit symbol list has no element " + std::to_string(n));
      return word_[n];
    case Kind::random: {
      // Counter-based, so element n never depends on earlier draws.
      const std::uint64_t a = alphabet_;
      const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % a);
      std::uint64_t x = derive_seed(seed_, n);
      while (x >= limit) x = mix64(x);
      return Symbol{static_cast<std::uint32_t>(x % a)};
    }
  }
  return {};
}

SymbolWord SymbolStream::take(std::size_t n) const {
  SymbolWord out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  return out;
}

std::string SymbolStream::describe() const {
  auto word = [&] {
    std::string s;
    for (std::size_t i = 0; i < word_.size(); ++i) s += (i ? " " : "") + std::to_string(word_[i].value);
    return s;
  };
  switch (kind_) {
    case Kind::constant: return "constant(" + std::to_string(word_.front().value) + ")";
    case Kind::periodic: return "periodic(" + word() + ")";
    case Kind::random:
      return "random(alphabet=" + std::to_string(alphabet_) + ",seed=" + std::to_string(seed_) + ")";
    case Kind::explicit_list: return "list(" + std::to_string(word_.size()) + " symbols)";
  }
  return {};
}

}  // namespace avgshadow
