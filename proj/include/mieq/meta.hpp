#pragma once

// Pooling several studies of the same two variables into one MI and p-value.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mieq/equivalence.hpp"
#include "mieq/exact_tests.hpp"
#include "mieq/tables.hpp"

namespace mieq {

// Ordered studies of identical shape.
class StudySet {
 public:
  // Throws DomainError if empty or shapes differ.
  explicit StudySet(std::vector<CountTable> studies);

  const std::vector<CountTable>& studies() const noexcept { return studies_; }
  std::size_t size() const noexcept { return studies_.size(); }
  std::vector<Count> sample_sizes() const;

 private:
  std::vector<CountTable> studies_;
};

enum class PoolingMethod { Cellwise, Weighted };

struct PooledResult {
  CountTable pooled_table;
  RelTable pooled_rel;
  Count n_s = 0;
  Nats mi_s;
  FisherResult fisher;  // p_s = fisher.p_f
  BoundCertificate certificate;
  PoolingMethod method = PoolingMethod::Cellwise;
};

// Sums the studies cell by cell and tests the pooled table.
PooledResult pool_cellwise(const StudySet& s, const FisherOptions& options = {});

struct StudyMi {
  Count n = 0;
  Nats mi;
};

// N_s = sum N_h and MI_s = sum N_h MI_h / N_s.
StudyMi pool_weighted(std::span<const StudyMi> studies);

struct CombinedPValue {
  double p_s = 1.0;
  double log_p_s = 0.0;
  Nats mi_s;
  Count n_s = 0;
};

// p_s = prod p_h (in log space) and MI_s = -ln(p_s) / sum N_h.
CombinedPValue combine_pvalues(std::span<const double> p_list, std::span<const Count> n_list);
CombinedPValue combine_log_pvalues(std::span<const double> log_p_list, std::span<const Count> n_list);

// exp(-N_h MI_h).
double per_study_pvalue(Nats mi_h, Count n_h);

}  // namespace mieq
