// eval.hpp
// Sentence-level precision/recall/F against gold labels, DEF as the
// positive class, plus per-iteration CSV reporting for curve plotting.

#ifndef DEFEXT_EVAL_HPP
#define DEFEXT_EVAL_HPP

#include <string>
#include <vector>

#include "defext/corpus.hpp"
#include "defext/crf.hpp"

namespace defext {

struct PRF {
  double precision = 1.0;
  double recall = 1.0;
  double f_score = 1.0;
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

// precision 1 when nothing was predicted positive, recall 1 when there are
// no gold positives, F = 0 when both are 0 (harmonic mean convention)
PRF compute_prf(long tp, long fp, long fn, long tn);

// classify every gold sentence and count against its label
PRF evaluate(const CrfModel& model, const Corpus& gold, int jobs = 1);

// one row per (iteration, dataset)
struct IterationReport {
  int iteration = 0;
  std::string dataset;  // must not contain ',' or newlines (bare CSV field)
  PRF prf;
  long n_promoted_def = 0;
  long n_promoted_nodef = 0;
};

// CSV with header iteration,dataset,precision,recall,f_score,
// n_promoted_def,n_promoted_nodef. Doubles are written shortest-roundtrip
// so parsing the file back recovers them exactly. Empty history is an
// error; rows keep the given order.
void emit_report(const std::vector<IterationReport>& history, const std::string& path);

// gnuplot-ready "iteration f_score" pairs for one dataset
void emit_fscore_series(const std::vector<IterationReport>& history, const std::string& dataset,
                        const std::string& path);

// shortest double representation that parses back to the same value
std::string format_double(double v);

}  // namespace defext

#endif  // DEFEXT_EVAL_HPP
