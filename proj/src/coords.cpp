#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/geotext.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

constexpr std::string_view kLatPlaceholder = "[Latitude]";
constexpr std::string_view kLonPlaceholder = "[Longitude]";
constexpr std::string_view kDegree = "\xC2\xB0";

std::string fixed4(double v) {
  std::string s = fmt::format("{:.4f}", v);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

enum class CoordForm { hemisphere, decimal };

struct CoordParse {
  std::optional<GeoPoint> point;
  CoordForm form = CoordForm::decimal;
  bool both_have_fraction = false;
  std::size_t consumed = 0;
  std::size_t error_at = 0;
  std::string error;
};

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && str::is_space(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view lit) {
    if (s_.substr(pos_).starts_with(lit)) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }
  std::optional<char> peek() const { return pos_ < s_.size() ? std::optional<char>(s_[pos_]) : std::nullopt; }
  bool at_end() const { return pos_ >= s_.size(); }
  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

  // [sign] digits [. digits]
  std::optional<double> number(bool allow_sign, bool& has_fraction) {
    const std::size_t start = pos_;
    if (allow_sign && !eat("-")) eat("+");
    const std::size_t digits_start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    bool any_digits = pos_ > digits_start;
    has_fraction = false;
    if (!at_end() && s_[pos_] == '.') {
      const std::size_t dot = pos_++;
      const std::size_t frac_start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == frac_start) {
        pos_ = dot;
      } else {
        has_fraction = true;
        any_digits = true;
      }
    }
    if (!any_digits) {
      pos_ = start;
      return std::nullopt;
    }
    double v = 0;
    str::parse_double(s_.substr(start, pos_ - start), v);
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// Parses a coordinate at the start of `s`; `full` requires nothing but
// whitespace after it.
CoordParse parse_coord(std::string_view s, bool full) {
  CoordParse r;
  Cursor c(s);
  auto fail = [&](std::string msg) {
    r.error_at = c.pos();
    r.error = std::move(msg);
    return r;
  };
  c.skip_ws();
  bool frac1 = false, frac2 = false;
  const std::size_t num_start = c.pos();
  auto first = c.number(true, frac1);
  if (!first) return fail("expected a number");
  c.skip_ws();
  const bool degree = c.eat(kDegree);
  c.skip_ws();
  double lat = *first;
  double lon = 0;
  auto hemi = c.peek();
  const bool hemisphere_form = degree || (hemi && (*hemi == 'N' || *hemi == 'S' || *hemi == 'E' || *hemi == 'W'));
  if (hemisphere_form) {
    r.form = CoordForm::hemisphere;
    if (s[num_start] == '-' || s[num_start] == '+') return fail("hemisphere form takes unsigned degrees");
    hemi = c.peek();
    if (!hemi || (*hemi != 'N' && *hemi != 'S')) return fail("expected hemisphere N or S");
    if (*hemi == 'S') lat = -lat;
    c.advance();
    c.skip_ws();
    if (!c.eat(",")) return fail("expected ','");
    c.skip_ws();
    auto second = c.number(false, frac2);
    if (!second) return fail("expected longitude degrees");
    c.skip_ws();
    c.eat(kDegree);
    c.skip_ws();
    auto h2 = c.peek();
    if (!h2 || (*h2 != 'E' && *h2 != 'W')) return fail("expected hemisphere E or W");
    lon = *h2 == 'W' ? -*second : *second;
    c.advance();
  } else {
    if (!c.eat(",")) return fail("expected ','");
    c.skip_ws();
    auto second = c.number(true, frac2);
    if (!second) return fail("expected longitude");
    lon = *second;
  }
  r.consumed = c.pos();
  if (full) {
    c.skip_ws();
    if (!c.at_end()) return fail("unexpected trailing characters");
  }
  if (!(lat >= -90.0 && lat <= 90.0)) return fail("latitude out of range");
  r.both_have_fraction = frac1 && frac2;
  r.point = normalize_point(lat, lon);
  return r;
}

}  // namespace

std::string coord_to_text(const GeoPoint& p, std::string_view tmpl) {
  if (tmpl.find(kLatPlaceholder) == std::string_view::npos || tmpl.find(kLonPlaceholder) == std::string_view::npos) {
    throw Error(ErrorCode::bad_template, fmt::format("template '{}' needs [Latitude] and [Longitude]", tmpl));
  }
  std::string out(tmpl);
  replace_all(out, kLatPlaceholder, fixed4(p.lat()));
  replace_all(out, kLonPlaceholder, fixed4(p.lon()));
  return out;
}

GeoPoint text_to_coord(std::string_view s) {
  auto r = parse_coord(s, true);
  if (!r.point) {
    throw Error(ErrorCode::parse_error, fmt::format("cannot parse coordinate at offset {}: {}", r.error_at, r.error),
                r.error_at);
  }
  return *r.point;
}

std::vector<CoordinateMatch> find_coordinates(std::string_view text) {
  std::vector<CoordinateMatch> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool starts_number = std::isdigit(c) || ((c == '-' || c == '+') && i + 1 < text.size() &&
                                                   std::isdigit(static_cast<unsigned char>(text[i + 1])));
    const bool boundary = i == 0 || !(str::is_word_byte(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '.' ||
                                      text[i - 1] == '-' || text[i - 1] == '+');
    if (starts_number && boundary) {
      auto r = parse_coord(text.substr(i), false);
      if (r.point && (r.form == CoordForm::hemisphere || r.both_have_fraction)) {
        out.push_back({*r.point, i, i + r.consumed});
        i += r.consumed;
        continue;
      }
    }
    ++i;
  }
  return out;
}

}  // namespace geoctx
