#include "squish/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace squish {

namespace {

std::uint32_t bin_of(const std::vector<double>& cuts, double x) {
  return static_cast<std::uint32_t>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

void check_cuts(const std::vector<double>& cuts) {
  for (double c : cuts)
    if (!std::isfinite(c)) throw ConfigError("bin cut points must be finite");
  if (!std::is_sorted(cuts.begin(), cuts.end()) || std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end())
    throw ConfigError("bin cut points must be strictly increasing");
}

}  // namespace

Interpreter Interpreter::identity(std::size_t domain_size) {
  if (domain_size == 0) throw ConfigError("identity interpreter needs a non-empty domain");
  Interpreter it;
  it.kind_ = Kind::Identity;
  it.domain_size_ = domain_size;
  return it;
}

Interpreter Interpreter::binning(std::vector<double> cuts) {
  check_cuts(cuts);
  Interpreter it;
  it.kind_ = Kind::Binning;
  it.cuts_ = std::move(cuts);
  return it;
}

Interpreter Interpreter::equal_width(const Range& range, std::size_t bins) {
  if (bins == 0) throw ConfigError("binning needs at least one bin");
  std::vector<double> cuts;
  const double w = range.width() / static_cast<double>(bins);
  for (std::size_t k = 1; k < bins; ++k) {
    const double c = range.lo + w * static_cast<double>(k);
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  return binning(std::move(cuts));
}

Interpreter Interpreter::string_length(std::vector<double> cuts) {
  check_cuts(cuts);
  Interpreter it;
  it.kind_ = Kind::StringLength;
  it.cuts_ = std::move(cuts);
  return it;
}

Value Interpreter::interpret(const Value& v) const {
  switch (kind_) {
    case Kind::Identity:
      return v;
    case Kind::Binning: {
      const auto* x = std::get_if<double>(&v);
      if (!x) throw std::invalid_argument("binning interpreter needs a numeric value");
      return Cat{bin_of(cuts_, *x)};
    }
    case Kind::StringLength: {
      const auto* s = std::get_if<std::string>(&v);
      if (!s) throw std::invalid_argument("string-length interpreter needs a string value");
      const auto len = static_cast<double>(s->size());
      if (cuts_.empty()) return len;
      return Cat{bin_of(cuts_, len)};
    }
  }
  return v;
}

std::size_t Interpreter::cardinality() const noexcept {
  switch (kind_) {
    case Kind::Identity: return domain_size_;
    case Kind::Binning: return cuts_.size() + 1;
    case Kind::StringLength: return cuts_.empty() ? 0 : cuts_.size() + 1;
  }
  return 0;
}

void Interpreter::write(ByteWriter& out) const {
  out.u8(static_cast<std::uint8_t>(kind_));
  if (kind_ == Kind::Identity) {
    out.varint(domain_size_);
    return;
  }
  out.varint(cuts_.size());
  for (double c : cuts_) out.f64(c);
}

Interpreter Interpreter::read(ByteReader& in) {
  const auto kind = in.u8();
  try {
    switch (kind) {
      case 0: return identity(in.count(1u << 31));
      case 1:
      case 2: {
        std::vector<double> cuts(in.count(in.remaining() / 8));
        for (auto& c : cuts) c = in.f64();
        return kind == 1 ? binning(std::move(cuts)) : string_length(std::move(cuts));
      }
      default: break;
    }
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad interpreter: ") + e.what());
  }
  throw FormatError("unknown interpreter kind " + std::to_string(kind));
}

}  // namespace squish
