#pragma once

#include <filesystem>
#include <string>

#include "lorasf/metrics.hpp"
#include "lorasf/sweep.hpp"

namespace lorasf {

/// Formats a unit-scale metric as a percentage with two decimals, rounding
/// half-up on the decimal value (0.65725 -> "65.73"). Rounding happens on
/// the shortest decimal representation of the double, not on its binary
/// value, so values that print as x.xx5 round up.
std::string format_pct(double unit_value);

/// Writes the five per-size tables (singles, pairs, triples, quads, full
/// set) under out_dir/tables as Markdown + CSV. Columns: k-NN, MLR, DTC, RF,
/// Average. In each table the row with the best average accuracy is bolded
/// in the Markdown rendering. strict=true requires the full 31x4 sweep;
/// partial mode renders the serials that have all four kinds.
void emit_tables(const SweepReport& report, const std::filesystem::path& out_dir,
                 bool strict = true);

/// Writes out_dir/figures/fig2.csv (serial, label, avg acc %, avg F1 %) and
/// an SVG line rendering of the same series.
void emit_figure_data(const SweepReport& report, const std::filesystem::path& out_dir,
                      bool svg = true);

/// Writes out_dir/ranking.csv plus figures/fig3.csv and a bar-chart SVG.
void emit_ranking(const CorrelationReport& ranking, const std::filesystem::path& out_dir,
                  bool svg = true);

/// Writes out_dir/metadata.json: sweep identity (dataset hash, seeds,
/// standardization, hyperparameters) plus the effective run configuration
/// when the caller provides one (JSON text, or empty).
void write_metadata(const SweepReport& report, const std::string& effective_config_json,
                    const std::filesystem::path& out_dir);

/// Catalog dump (serial, label, members) for report tooling.
void write_catalog_json(const std::filesystem::path& out_dir);

}  // namespace lorasf
