// Times the two batch kernels that carry an OpenMP path (the batch gradient
// and pool scoring) against their serial reference, and checks the outputs
// agree bit for bit. Not a ctest; run it by hand:
//   build/bench/bench_kernels [n_sentences] [jobs]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "defext/corpus.hpp"
#include "defext/crf.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace defext;

namespace {

Corpus synthetic_corpus(std::mt19937& rng, int n_sentences, bool labeled) {
  std::vector<std::string> vocab;
  for (int i = 0; i < 200; ++i) vocab.push_back("w" + std::to_string(i));
  std::uniform_int_distribution<int> len(8, 24);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> lab(0, 1);

  Corpus c;
  c.schema = ColumnSchema({"form"});
  c.labeled = labeled;
  for (int i = 0; i < n_sentences; ++i) {
    Sentence s;
    if (labeled) s.label = (Label)lab(rng);
    int n = len(rng);
    for (int t = 0; t < n; ++t) {
      Token tok;
      tok.columns = {vocab[pick(rng)]};
      tok.label = s.label;
      s.tokens.push_back(std::move(tok));
    }
    c.sentences.push_back(std::move(s));
  }
  return c;
}

template <class F>
double time_ms(F&& f, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n_sentences = argc > 1 ? std::atoi(argv[1]) : 400;
  int jobs = argc > 2 ? std::atoi(argv[2]) : 0;
#ifdef _OPENMP
  if (jobs <= 0) jobs = omp_get_max_threads();
  std::printf("OpenMP enabled, %d thread(s) requested\n", jobs);
#else
  if (jobs <= 0) jobs = 1;
  std::printf("built without OpenMP, parallel path degenerates to serial\n");
#endif

  std::mt19937 rng(7);
  Corpus train_set = synthetic_corpus(rng, n_sentences, true);
  Corpus pool = synthetic_corpus(rng, n_sentences, false);
  TemplateSet templates = parse_templates(
      "U00:%x[0,0]\n"
      "U01:%x[-1,0]\n"
      "U02:%x[1,0]\n"
      "U03:%x[-1,0]/%x[0,0]\n"
      "B\n");

  CrfModel model;
  model.templates = templates;
  model.schema = train_set.schema;
  model.schema_fingerprint = train_set.schema.fingerprint();
  for (const Sentence& s : train_set.sentences)
    for (const auto& row : expand_features(s, templates, train_set.schema))
      for (const auto& f : row) model.index.insert(f);
  std::uniform_real_distribution<double> w(-0.5, 0.5);
  model.weights.resize(model.index.n_weights(templates.bigram));
  for (double& v : model.weights) v = w(rng);

  std::printf("%d sentences, %zu weights\n\n", n_sentences, model.weights.size());

  std::vector<double> g_serial, g_parallel;
  double ll_serial = 0.0, ll_parallel = 0.0;
  double grad1 = time_ms(
      [&] { ll_serial = log_likelihood_and_gradient(model, train_set, g_serial, 1); }, 3);
  double gradN = time_ms(
      [&] { ll_parallel = log_likelihood_and_gradient(model, train_set, g_parallel, jobs); }, 3);
  bool grad_same = ll_serial == ll_parallel && g_serial == g_parallel;
  std::printf("batch gradient   serial %8.2f ms   jobs=%d %8.2f ms   speedup %.2fx   %s\n",
              grad1, jobs, gradN, grad1 / gradN,
              grad_same ? "bit-identical" : "MISMATCH");

  std::vector<Classification> c_serial, c_parallel;
  double cls1 = time_ms([&] { c_serial = classify_corpus(model, pool, 1); }, 3);
  double clsN = time_ms([&] { c_parallel = classify_corpus(model, pool, jobs); }, 3);
  bool cls_same = c_serial.size() == c_parallel.size();
  for (std::size_t i = 0; cls_same && i < c_serial.size(); ++i)
    cls_same = c_serial[i].label == c_parallel[i].label &&
               c_serial[i].confidence == c_parallel[i].confidence;
  std::printf("pool scoring     serial %8.2f ms   jobs=%d %8.2f ms   speedup %.2fx   %s\n",
              cls1, jobs, clsN, cls1 / clsN,
              cls_same ? "bit-identical" : "MISMATCH");

  return (grad_same && cls_same) ? 0 : 1;
}
