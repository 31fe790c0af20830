#include "market.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "csv.hpp"
#include "error.hpp"

namespace matchmarket {

VariantTable::VariantTable(std::vector<double> vendor, std::vector<double> buyers,
                           std::size_t m_buyers)
    : vendor_(std::move(vendor)), buyers_(std::move(buyers)), m_(m_buyers) {
  if (vendor_.empty()) fail(ErrorCode::InvalidInput, "variant table needs at least one variant");
  if (m_ == 0) fail(ErrorCode::InvalidInput, "variant table needs at least one buyer");
  if (buyers_.size() != m_ * vendor_.size()) {
    fail(ErrorCode::InvalidInput, "buyer utility matrix does not have M x N entries");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(vendor_.begin(), vendor_.end(), finite) ||
      !std::all_of(buyers_.begin(), buyers_.end(), finite)) {
    fail(ErrorCode::InvalidInput, "variant table entries must be finite");
  }
}

VariantTable VariantTable::single_buyer(std::vector<double> buyer, std::vector<double> vendor) {
  if (buyer.size() != vendor.size()) {
    fail(ErrorCode::InvalidInput, "buyer and vendor utilities differ in length");
  }
  return VariantTable(std::move(vendor), std::move(buyer), 1);
}

double VariantTable::buyer_mean(std::size_t alpha) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < m_; ++i) sum += buyer(i, alpha);
  return sum / static_cast<double>(m_);
}

VariantTable VariantTable::scaled(double c) const {
  auto v = vendor_;
  auto b = buyers_;
  for (auto& e : v) e *= c;
  for (auto& e : b) e *= c;
  return VariantTable(std::move(v), std::move(b), m_);
}

VariantTable VariantTable::shifted(double c) const {
  auto v = vendor_;
  auto b = buyers_;
  for (auto& e : v) e += c;
  for (auto& e : b) e += c;
  return VariantTable(std::move(v), std::move(b), m_);
}

UtilityRule UtilityRule::knorm(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    fail(ErrorCode::InvalidRule, "k-norm exponent must be positive and finite");
  }
  return {RuleKind::KNorm, k};
}

void UtilityRule::check_compatible(std::size_t m_buyers) const {
  if (kind == RuleKind::KNorm && !(k > 0.0)) {
    fail(ErrorCode::InvalidRule, "k-norm exponent must be positive");
  }
  if (kind != RuleKind::MultiBuyerAverage && m_buyers != 1) {
    fail(ErrorCode::InvalidRule, "only the multi-buyer average rule accepts more than one buyer");
  }
}

std::optional<double> pair_utility(const UtilityRule& rule, double x, double y) {
  switch (rule.kind) {
    case RuleKind::Linear:
    case RuleKind::MultiBuyerAverage:
      return x + y;
    case RuleKind::MinRule:
      return std::min(x, y);
    case RuleKind::KNorm: {
      if (!(x > 0.0 && y > 0.0)) return std::nullopt;
      if (rule.k == 1.0) return x + y;
      // max * (1 + (min/max)^k)^(1/k) stays finite for large k.
      const double hi = std::max(x, y);
      const double lo = std::min(x, y);
      return hi * std::pow(1.0 + std::pow(lo / hi, rule.k), 1.0 / rule.k);
    }
  }
  return std::nullopt;
}

namespace {

double buyer_value(const VariantTable& table, std::size_t alpha) {
  return table.buyers() == 1 ? table.buyer(0, alpha) : table.buyer_mean(alpha);
}

}  // namespace

std::optional<double> total_utility(const UtilityRule& rule, const VariantTable& table,
                                    std::size_t alpha) {
  rule.check_compatible(table.buyers());
  if (alpha >= table.variants()) fail(ErrorCode::InvalidInput, "variant index out of range");
  return pair_utility(rule, buyer_value(table, alpha), table.vendor(alpha));
}

MatchOutcome matchmaker_select(const UtilityRule& rule, const VariantTable& table) {
  rule.check_compatible(table.buyers());
  MatchOutcome out;
  for (std::size_t alpha = 0; alpha < table.variants(); ++alpha) {
    const double x = buyer_value(table, alpha);
    const double y = table.vendor(alpha);
    const auto u = pair_utility(rule, x, y);
    if (!u) continue;
    if (!out.traded() || *u > out.total_utility) {
      out.status = MatchStatus::Trade;
      out.chosen_index = alpha;
      out.total_utility = *u;
      out.buyer_utility = x;
      out.vendor_utility = y;
    }
  }
  if (out.traded() && table.buyers() == 1) {
    out.inequality = std::abs(out.buyer_utility - out.vendor_utility);
  }
  return out;
}

bool scale_invariance_check(const UtilityRule& rule, const VariantTable& table, double c) {
  if (!(c > 0.0)) fail(ErrorCode::InvalidParameter, "scale factor must be positive");
  if (rule.kind == RuleKind::MultiBuyerAverage) {
    fail(ErrorCode::InvalidRule, "scale check applies to single-buyer rules");
  }
  const auto base = matchmaker_select(rule, table);
  const auto scaled = matchmaker_select(rule, table.scaled(c));
  if (base.status != scaled.status) return false;
  return !base.traded() || base.chosen_index == scaled.chosen_index;
}

void write_table_csv(std::ostream& out, const VariantTable& table) {
  out << "alpha,y";
  for (std::size_t i = 0; i < table.buyers(); ++i) out << ",x_" << (i + 1);
  out << '\n';
  for (std::size_t alpha = 0; alpha < table.variants(); ++alpha) {
    out << alpha << ',' << csv::format_double(table.vendor(alpha));
    for (std::size_t i = 0; i < table.buyers(); ++i) {
      out << ',' << csv::format_double(table.buyer(i, alpha));
    }
    out << '\n';
  }
}

VariantTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::InvalidInput, "variant table CSV is empty");
  const auto header = csv::split_record(line);
  if (header.size() < 3 || header[0] != "alpha" || header[1] != "y") {
    fail(ErrorCode::InvalidInput, "variant table CSV header must be alpha,y,x_1..x_M");
  }
  const std::size_t m = header.size() - 2;
  for (std::size_t i = 0; i < m; ++i) {
    if (header[i + 2] != "x_" + std::to_string(i + 1)) {
      fail(ErrorCode::InvalidInput, "unexpected column '" + header[i + 2] + "'");
    }
  }
  std::vector<double> vendor;
  std::vector<std::vector<double>> columns;  // per variant, M buyer values
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_record(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::InvalidInput, "variant table row has wrong number of fields");
    }
    if (csv::parse_double(fields[0]) != static_cast<double>(vendor.size())) {
      fail(ErrorCode::InvalidInput, "variant rows must be numbered 0, 1, 2, ...");
    }
    vendor.push_back(csv::parse_double(fields[1]));
    auto& col = columns.emplace_back(m);
    for (std::size_t i = 0; i < m; ++i) col[i] = csv::parse_double(fields[i + 2]);
  }
  std::vector<double> buyers(m * vendor.size());
  for (std::size_t alpha = 0; alpha < vendor.size(); ++alpha) {
    for (std::size_t i = 0; i < m; ++i) buyers[i * vendor.size() + alpha] = columns[alpha][i];
  }
  return VariantTable(std::move(vendor), std::move(buyers), m);
}

}  // namespace matchmarket
