#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "senti/training.hpp"

namespace senti {

void to_json(nlohmann::json& j, const Hyperparameters& hp);
void from_json(const nlohmann::json& j, Hyperparameters& hp);

// Everything except wall-clock times, so identical runs serialize
// identically. Timings go to timings_json.
nlohmann::json report_json(const TrainReport& report);
TrainReport train_report_from_json(const nlohmann::json& j);
nlohmann::json timings_json(const TrainReport& report);

// {"rows": [{variant, lr, hidden, optimizer, split, f1w, pw, rw, acc,
// epoch_losses, zero_denominator, error}], "best": [...]}. Metrics of failed
// runs are null.
nlohmann::json sweep_json(const SweepReport& report);
SweepReport sweep_from_json(const nlohmann::json& j);

// Aligned plain-text tables, one block per (variant, optimizer) with columns
// Learning Rate | Model Evaluation | Hidden Units | F1_w | P_w | R_w | A |
// Status, followed by the best-per-variant summary. Epoch losses are not part
// of the table.
std::string render_sweep_tables(const SweepReport& report);
// Inverse of render_sweep_tables. Throws ParseError on malformed input.
SweepReport parse_sweep_tables(const std::string& text);

}  // namespace senti
