#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace matchmarket {

/// One market instance: N variants, a vendor utility y per variant and an
/// M x N matrix of buyer utilities x. Immutable after construction.
class VariantTable {
 public:
  /// buyers is row-major, one row of N entries per buyer.
  VariantTable(std::vector<double> vendor, std::vector<double> buyers, std::size_t m_buyers);

  static VariantTable single_buyer(std::vector<double> buyer, std::vector<double> vendor);

  std::size_t variants() const { return vendor_.size(); }
  std::size_t buyers() const { return m_; }

  double vendor(std::size_t alpha) const { return vendor_[alpha]; }
  double buyer(std::size_t i, std::size_t alpha) const { return buyers_[i * variants() + alpha]; }
  /// Mean buyer utility of variant alpha (a_alpha).
  double buyer_mean(std::size_t alpha) const;

  std::span<const double> vendor_utilities() const { return vendor_; }
  std::span<const double> buyer_row(std::size_t i) const {
    return std::span<const double>(buyers_).subspan(i * variants(), variants());
  }

  VariantTable scaled(double c) const;
  VariantTable shifted(double c) const;

 private:
  std::vector<double> vendor_;
  std::vector<double> buyers_;
  std::size_t m_;
};

enum class RuleKind { Linear, KNorm, MinRule, MultiBuyerAverage };

struct UtilityRule {
  RuleKind kind = RuleKind::Linear;
  double k = 1.0;  // KNorm only

  static UtilityRule linear() { return {RuleKind::Linear, 1.0}; }
  static UtilityRule knorm(double k);
  static UtilityRule min_rule() { return {RuleKind::MinRule, 1.0}; }
  static UtilityRule multi_buyer_average() { return {RuleKind::MultiBuyerAverage, 1.0}; }

  /// Throws InvalidRule if the rule cannot score a table with m buyers.
  void check_compatible(std::size_t m_buyers) const;
};

enum class MatchStatus { Trade, NoTrade };

struct MatchOutcome {
  MatchStatus status = MatchStatus::NoTrade;
  std::size_t chosen_index = 0;
  double total_utility = 0.0;  // value of the rule at the chosen variant
  double buyer_utility = 0.0;  // mean over buyers when M > 1
  double vendor_utility = 0.0;
  std::optional<double> inequality;  // |x - y|, single buyer only

  bool traded() const { return status == MatchStatus::Trade; }
  /// x + y at the chosen variant, independent of the rule.
  double joint_utility() const { return buyer_utility + vendor_utility; }
};

/// Rule value for one (x, y) pair; nullopt when the k-norm excludes it.
std::optional<double> pair_utility(const UtilityRule& rule, double x, double y);

std::optional<double> total_utility(const UtilityRule& rule, const VariantTable& table,
                                    std::size_t alpha);

/// Variant maximizing the rule; ties go to the lowest index.
MatchOutcome matchmaker_select(const UtilityRule& rule, const VariantTable& table);

bool scale_invariance_check(const UtilityRule& rule, const VariantTable& table, double c);

// CSV layout: header "alpha,y,x_1,...,x_M", one row per variant.
void write_table_csv(std::ostream& out, const VariantTable& table);
VariantTable read_table_csv(std::istream& in);

}  // namespace matchmarket
