// Writes synthetic data in the Twitter US Airline CSV layout, or a plain
// keyword-labelled corpus, for trying the pipeline without the real datasets.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "senti/dataset.hpp"
#include "senti/error.hpp"
#include "senti/hash.hpp"
#include "senti/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic sentiment data"};
  std::string out;
  std::size_t rows = 2000;
  std::uint64_t seed = 1;
  double signal = 0.8;
  std::vector<double> weights;
  app.add_option("--out", out, "Output CSV")->required();
  app.add_option("--rows", rows, "Number of rows");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--signal", signal, "Probability that a row carries a class cue word");
  app.add_option("--weights", weights, "Class weights; switches to a two-column text,label corpus");
  CLI11_PARSE(app, argc, argv);

  try {
    std::string csv;
    if (weights.empty()) {
      csv = senti::synthetic_airline_csv(rows, seed, signal);
    } else {
      senti::SyntheticOptions opt;
      opt.size = rows;
      opt.seed = seed;
      opt.signal = signal;
      opt.class_weights = weights;
      csv = "text,label\n";
      for (const auto& d : senti::synthetic_corpus(opt)) {
        csv += senti::csv_escape(d.text) + ',' + d.label + '\n';
      }
    }
    senti::write_file(out, csv);
  } catch (const senti::Error& e) {
    std::cerr << "error: kind=" << e.kind() << " msg=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
