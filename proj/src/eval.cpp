#include "defext/eval.hpp"

#include <charconv>
#include <fstream>

#include "defext/errors.hpp"

namespace defext {

PRF compute_prf(long tp, long fp, long fn, long tn) {
  if (tp < 0 || fp < 0 || fn < 0 || tn < 0) throw PreconditionError("negative count");
  PRF r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  r.precision = tp + fp == 0 ? 1.0 : (double)tp / (double)(tp + fp);
  r.recall = tp + fn == 0 ? 1.0 : (double)tp / (double)(tp + fn);
  double pr = r.precision + r.recall;
  r.f_score = pr == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / pr;
  return r;
}

PRF evaluate(const CrfModel& model, const Corpus& gold, int jobs) {
  if (!gold.labeled) throw PreconditionError("evaluation corpus must be labeled");
  if (gold.sentences.empty()) throw EmptyCorpusError("evaluation corpus is empty");
  auto predictions = classify_corpus(model, gold, jobs);

  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bool pred_def = predictions[i].label == Label::Def;
    bool gold_def = gold.sentences[i].label == Label::Def;
    if (pred_def && gold_def)
      ++tp;
    else if (pred_def && !gold_def)
      ++fp;
    else if (!pred_def && gold_def)
      ++fn;
    else
      ++tn;
  }
  return compute_prf(tp, fp, fn, tn);
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw PreconditionError("double formatting failed");
  return std::string(buf, p);
}

namespace {

void check_dataset_name(const std::string& name) {
  if (name.empty() || name.find(',') != std::string::npos ||
      name.find('\n') != std::string::npos)
    throw PreconditionError("dataset name '" + name + "' is not a bare CSV field");
}

}  // namespace

void emit_report(const std::vector<IterationReport>& history, const std::string& path) {
  if (history.empty()) throw PreconditionError("cannot emit a report from an empty history");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iteration,dataset,precision,recall,f_score,n_promoted_def,n_promoted_nodef\n";
  for (const IterationReport& r : history) {
    check_dataset_name(r.dataset);
    out << r.iteration << ',' << r.dataset << ',' << format_double(r.prf.precision) << ','
        << format_double(r.prf.recall) << ',' << format_double(r.prf.f_score) << ','
        << r.n_promoted_def << ',' << r.n_promoted_nodef << '\n';
  }
  if (!out.good()) throw IoError("failed writing " + path);
}

void emit_fscore_series(const std::vector<IterationReport>& history, const std::string& dataset,
                        const std::string& path) {
  if (history.empty()) throw PreconditionError("cannot emit a series from an empty history");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const IterationReport& r : history)
    if (r.dataset == dataset) out << r.iteration << ' ' << format_double(r.prf.f_score) << '\n';
  if (!out.good()) throw IoError("failed writing " + path);
}

}  // namespace defext
