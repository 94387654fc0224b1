#pragma once

#include "error.hpp"
#include "protocol.hpp"
#include "scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

// Verification and morphing-attack metrics. Conventions, fixed everywhere:
// scores are similarities, a comparison is accepted iff score >= threshold,
// and the operating threshold is chosen on the bona fide impostor scores.

namespace morphkit {

struct MorphAttackRow {
    std::string morph_id;
    std::string subject_id; // contributing subject this comparison targets
    double score = 0.0;
};

struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
    std::vector<MorphAttackRow> morph_attacks;
};

enum class ScenarioMode { morphs_as_references, morphs_as_probes };
enum class MmpmrRule { min, any };

inline const char* scenario_mode_name(ScenarioMode mode)
{
    return mode == ScenarioMode::morphs_as_references ? "references" : "probes";
}

inline const char* mmpmr_rule_name(MmpmrRule rule)
{
    return rule == MmpmrRule::min ? "min" : "any";
}

struct ScenarioConfig {
    ScenarioMode mode = ScenarioMode::morphs_as_references;
    double target_fmr = 0.001;
    MmpmrRule mmpmr_rule = MmpmrRule::min;
};

struct EvalReport {
    double threshold = 0.0;
    double fmr_at_threshold = 0.0;
    double fnmr_at_threshold = 0.0;
    double mmpmr = 0.0;
    long n_genuine = 0;
    long n_impostor = 0;
    long n_morphs = 0;
    long n_morph_comparisons = 0;
    double target_fmr = 0.001;
    MmpmrRule rule = MmpmrRule::min;
};

/// Proportion of impostor scores accepted (score >= threshold).
inline double fmr(const std::vector<double>& impostor_scores, double threshold)
{
    if (impostor_scores.empty())
        fail(errc::empty_scores, "fmr: no impostor scores");
    std::size_t accepted = 0;
    for (double s : impostor_scores)
        if (s >= threshold)
            ++accepted;
    return static_cast<double>(accepted) / static_cast<double>(impostor_scores.size());
}

/// Proportion of genuine scores rejected (score < threshold).
inline double fnmr(const std::vector<double>& genuine_scores, double threshold)
{
    if (genuine_scores.empty())
        fail(errc::empty_scores, "fnmr: no genuine scores");
    std::size_t rejected = 0;
    for (double s : genuine_scores)
        if (s < threshold)
            ++rejected;
    return static_cast<double>(rejected) / static_cast<double>(genuine_scores.size());
}

/// Smallest threshold drawn from the observed scores (plus a supremum
/// sentinel just above the maximum) whose FMR does not exceed the target.
inline double threshold_at_fmr(const std::vector<double>& impostor_scores, double target_fmr)
{
    if (impostor_scores.empty())
        fail(errc::empty_scores, "threshold_at_fmr: no impostor scores");
    if (!(target_fmr > 0.0 && target_fmr < 1.0))
        fail(errc::out_of_bounds, "threshold_at_fmr: target FMR must be in (0,1)");

    std::vector<double> sorted = impostor_scores;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1])
            continue;
        // scores at indices >= i are exactly those >= sorted[i]
        if (static_cast<double>(sorted.size() - i) / n <= target_fmr)
            return sorted[i];
    }
    return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
}

/// Per-morph acceptance rate at the threshold. Within each (morph, subject)
/// group multiple samples reduce by max; `min` accepts a morph only if every
/// contributing subject matches, `any` if at least one does.
inline double mmpmr(const std::vector<MorphAttackRow>& morph_rows, double threshold,
                    MmpmrRule rule)
{
    if (morph_rows.empty())
        fail(errc::empty_scores, "mmpmr: no morph comparisons");
    std::map<std::string, std::map<std::string, double>> best;
    for (const auto& row : morph_rows) {
        auto& per_subject = best[row.morph_id];
        const auto [it, inserted] = per_subject.try_emplace(row.subject_id, row.score);
        if (!inserted)
            it->second = std::max(it->second, row.score);
    }
    std::size_t accepted = 0;
    for (const auto& [morph_id, per_subject] : best) {
        bool ok = rule == MmpmrRule::min;
        for (const auto& [subject, score] : per_subject) {
            if (rule == MmpmrRule::min)
                ok = ok && score >= threshold;
            else
                ok = ok || score >= threshold;
        }
        if (ok)
            ++accepted;
    }
    return static_cast<double>(accepted) / static_cast<double>(best.size());
}

/// Regroup labeled score rows into a ScoreSet: bona fide rows feed the
/// genuine/impostor lists, morph rows keep their per-morph grouping keys.
inline ScoreSet assemble_scenario(const std::vector<ScoreRow>& rows, const ScenarioConfig&)
{
    ScoreSet set;
    for (const auto& row : rows) {
        if (!std::isfinite(row.score))
            fail(errc::non_finite, "assemble_scenario: non-finite score");
        switch (row.label) {
        case PairingLabel::genuine:
        case PairingLabel::impostor:
            if (!row.morph_id.empty() || !row.contrib_subject.empty())
                fail(errc::inconsistent_labels,
                     "assemble_scenario: bona fide row carries morph fields");
            (row.label == PairingLabel::genuine ? set.genuine : set.impostor).push_back(row.score);
            break;
        case PairingLabel::morph:
            if (row.morph_id.empty() || row.contrib_subject.empty())
                fail(errc::inconsistent_labels,
                     "assemble_scenario: morph row missing morph_id or contributing subject");
            set.morph_attacks.push_back({row.morph_id, row.contrib_subject, row.score});
            break;
        }
    }
    return set;
}

/// Fix the threshold on the bona fide impostors, then report all rates at it.
inline EvalReport evaluate(const ScoreSet& set, const ScenarioConfig& config)
{
    EvalReport report;
    report.target_fmr = config.target_fmr;
    report.rule = config.mmpmr_rule;
    report.threshold = threshold_at_fmr(set.impostor, config.target_fmr);
    report.fmr_at_threshold = fmr(set.impostor, report.threshold);
    report.fnmr_at_threshold = fnmr(set.genuine, report.threshold);
    report.n_genuine = static_cast<long>(set.genuine.size());
    report.n_impostor = static_cast<long>(set.impostor.size());
    report.n_morph_comparisons = static_cast<long>(set.morph_attacks.size());
    std::set<std::string> morph_ids;
    for (const auto& row : set.morph_attacks)
        morph_ids.insert(row.morph_id);
    report.n_morphs = static_cast<long>(morph_ids.size());
    report.mmpmr = set.morph_attacks.empty()
                       ? 0.0
                       : mmpmr(set.morph_attacks, report.threshold, config.mmpmr_rule);
    return report;
}

// ---------------------------------------------------------------------------
// Scenario pairing enumeration: which (reference, probe) comparisons exist in
// the bona fide part and in each morphing-attack mode.

/// A generated morph: its embedding/image id plus the two source image ids.
struct MorphInfo {
    std::string morph_id;
    std::string image_id_a;
    std::string image_id_b;
};

/// Parse a batch_morph manifest, keeping successful rows. The morph id is the
/// output file stem.
inline std::vector<MorphInfo> load_morph_table(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    const std::vector<std::string> header{"output", "id_a", "id_b", "alpha", "status", "message"};
    if (rows.empty() || rows[0] != header)
        fail(errc::parse_error, path.string() + ": bad or missing morph manifest header");
    std::vector<MorphInfo> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size())
            fail(errc::parse_error, path.string() + ": row " + std::to_string(r + 1)
                                        + ": expected 6 fields");
        if (rows[r][4] != "ok")
            continue;
        const std::filesystem::path output = rows[r][0];
        out.push_back({output.stem().string(), rows[r][1], rows[r][2]});
    }
    return out;
}

namespace detail {

struct IdentityImages {
    std::vector<std::string> enrolled;
    std::vector<std::string> probes;
};

inline std::map<std::string, IdentityImages>
split_enrollment(const std::vector<SubjectRecord>& records, int enroll_per_identity)
{
    std::map<std::string, std::vector<std::string>> images;
    for (const auto& rec : records)
        images[rec.subject_id].push_back(rec.image_id);
    std::map<std::string, IdentityImages> out;
    for (auto& [subject, ids] : images) {
        std::sort(ids.begin(), ids.end());
        IdentityImages split;
        const std::size_t n_enrolled =
            std::min<std::size_t>(std::max(1, enroll_per_identity), ids.size());
        split.enrolled.assign(ids.begin(), ids.begin() + n_enrolled);
        split.probes.assign(ids.begin() + n_enrolled, ids.end());
        out.emplace(subject, std::move(split));
    }
    return out;
}

} // namespace detail

/// Enumerate every comparison of a scenario: genuine (probe vs own
/// reference), zero-effort impostor (probe vs every other reference), and
/// morph attacks in the requested mode. Enrollment takes the first
/// `enroll_per_identity` images (by sorted image id) of each subject; the
/// rest probe.
inline std::vector<PairingEntry> enumerate_pairings(const std::vector<SubjectRecord>& records,
                                                    const std::vector<MorphInfo>& morphs,
                                                    ScenarioMode mode,
                                                    int enroll_per_identity = 1)
{
    const auto split = detail::split_enrollment(records, enroll_per_identity);
    std::map<std::string, std::string> subject_of_image;
    for (const auto& rec : records)
        subject_of_image[rec.image_id] = rec.subject_id;

    std::vector<PairingEntry> out;
    for (const auto& [ref_subject, ref_images] : split) {
        (void)ref_images;
        for (const auto& [probe_subject, probe_images] : split)
            for (const auto& image : probe_images.probes)
                out.push_back({ref_subject, image,
                               ref_subject == probe_subject ? PairingLabel::genuine
                                                            : PairingLabel::impostor,
                               "", ""});
    }

    for (const auto& morph : morphs) {
        const auto ia = subject_of_image.find(morph.image_id_a);
        const auto ib = subject_of_image.find(morph.image_id_b);
        if (ia == subject_of_image.end() || ib == subject_of_image.end())
            fail(errc::unknown_image_id, "enumerate_pairings: morph '" + morph.morph_id
                                             + "' references an unknown source image");
        for (const auto& subject : {ia->second, ib->second}) {
            if (mode == ScenarioMode::morphs_as_references) {
                const auto& images = split.at(subject);
                const auto& probe_images = images.probes.empty() ? images.enrolled : images.probes;
                for (const auto& image : probe_images)
                    out.push_back({morph.morph_id, image, PairingLabel::morph, morph.morph_id,
                                   subject});
            } else {
                out.push_back({subject, morph.morph_id, PairingLabel::morph, morph.morph_id,
                               subject});
            }
        }
    }
    return out;
}

/// Build the reference models a scenario needs: one per subject from its
/// enrolled images, plus (in references mode) one per morph from the morph's
/// own embedding.
inline std::vector<ReferenceModel>
build_scenario_references(const std::vector<Embedding>& embeddings,
                          const std::vector<SubjectRecord>& records,
                          const std::vector<MorphInfo>& morphs, ScenarioMode mode,
                          int enroll_per_identity = 1)
{
    std::map<std::string, const Embedding*> by_id;
    for (const auto& e : embeddings)
        by_id[e.image_id] = &e;
    const auto lookup = [&](const std::string& image_id) -> const Embedding& {
        const auto it = by_id.find(image_id);
        if (it == by_id.end())
            fail(errc::unknown_id, "build_scenario_references: no embedding for image '"
                                       + image_id + "'");
        return *it->second;
    };

    std::vector<ReferenceModel> refs;
    for (const auto& [subject, images] : detail::split_enrollment(records, enroll_per_identity)) {
        std::vector<Embedding> enrolled;
        for (const auto& image : images.enrolled)
            enrolled.push_back(lookup(image));
        refs.push_back(build_reference(subject, enrolled));
    }
    if (mode == ScenarioMode::morphs_as_references)
        for (const auto& morph : morphs)
            refs.push_back(build_reference(morph.morph_id, {lookup(morph.morph_id)}));
    return refs;
}

// ---------------------------------------------------------------------------
// Reporting

struct ReportEntry {
    std::string tool;
    std::string model;
    std::string dataset;
    ScenarioMode mode = ScenarioMode::morphs_as_references;
    EvalReport report;
};

struct ReportDocument {
    std::string csv_text;
    std::string table_text;
};

/// MMPMR as a percentage, one decimal, round-half-away-from-zero.
inline std::string format_percent(double rate)
{
    const long long tenths = std::llround(rate * 1000.0);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%lld", tenths / 10, std::llabs(tenths % 10));
    return buf;
}

/// Render the report rows as CSV plus an aligned text table whose cells pair
/// the two attack modes ("<references MMPMR> | <probes MMPMR>", in percent).
inline ReportDocument emit_report(std::vector<ReportEntry> entries)
{
    std::sort(entries.begin(), entries.end(), [](const ReportEntry& x, const ReportEntry& y) {
        return std::tie(x.tool, x.model, x.dataset, x.mode)
             < std::tie(y.tool, y.model, y.dataset, y.mode);
    });

    ReportDocument doc;
    doc.csv_text = "tool,model,dataset,mode,threshold,fmr,fnmr,mmpmr,n_morphs\n";
    for (const auto& e : entries)
        doc.csv_text += csv::join_row({e.tool, e.model, e.dataset, scenario_mode_name(e.mode),
                                       csv::format_double(e.report.threshold),
                                       csv::format_double(e.report.fmr_at_threshold),
                                       csv::format_double(e.report.fnmr_at_threshold),
                                       csv::format_double(e.report.mmpmr),
                                       std::to_string(e.report.n_morphs)})
                       + "\n";

    // (tool, model) rows x dataset columns, each cell "refs | probes"
    std::vector<std::pair<std::string, std::string>> row_keys;
    std::vector<std::string> datasets;
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<std::string, std::string>>
        cells;
    for (const auto& e : entries) {
        if (std::find(row_keys.begin(), row_keys.end(), std::make_pair(e.tool, e.model))
            == row_keys.end())
            row_keys.emplace_back(e.tool, e.model);
        if (std::find(datasets.begin(), datasets.end(), e.dataset) == datasets.end())
            datasets.push_back(e.dataset);
        auto& cell = cells[{e.tool, e.model, e.dataset}];
        (e.mode == ScenarioMode::morphs_as_references ? cell.first : cell.second) =
            format_percent(e.report.mmpmr);
    }
    std::sort(datasets.begin(), datasets.end());

    std::vector<std::vector<std::string>> table{{"Tool", "FRS"}};
    for (const auto& d : datasets)
        table[0].push_back(d);
    for (const auto& [tool, model] : row_keys) {
        std::vector<std::string> row{tool, model};
        for (const auto& d : datasets) {
            const auto it = cells.find({tool, model, d});
            if (it == cells.end()) {
                row.push_back("-");
            } else {
                const auto& [refs, probes] = it->second;
                row.push_back((refs.empty() ? "-" : refs) + " | "
                              + (probes.empty() ? "-" : probes));
            }
        }
        table.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(table[0].size(), 0);
    for (const auto& row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());

    std::string title = "MMPMR [%] (morphs as references | morphs as probes)";
    if (!entries.empty()) {
        title += ", threshold at FMR = " + format_percent(entries.front().report.target_fmr)
               + "%, rule = " + mmpmr_rule_name(entries.front().report.rule);
        title += "; similarity scores, acceptance is score >= threshold";
    }
    doc.table_text = title + "\n";
    for (std::size_t r = 0; r < table.size(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < table[r].size(); ++c) {
            std::string cell = table[r][c];
            cell.resize(widths[c], ' ');
            line += cell;
            if (c + 1 < table[r].size())
                line += "  ";
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        doc.table_text += line + "\n";
        if (r == 0) {
            std::string sep;
            for (std::size_t c = 0; c < widths.size(); ++c) {
                sep += std::string(widths[c], '-');
                if (c + 1 < widths.size())
                    sep += "  ";
            }
            doc.table_text += sep + "\n";
        }
    }
    return doc;
}

/// Parse rows previously written by emit_report's CSV (or by `evaluate`).
inline std::vector<ReportEntry> load_report_rows(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    const std::vector<std::string> header{"tool", "model", "dataset", "mode", "threshold",
                                          "fmr",  "fnmr",  "mmpmr",   "n_morphs"};
    if (rows.empty() || rows[0] != header)
        fail(errc::parse_error, path.string() + ": bad or missing report header");
    std::vector<ReportEntry> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::string context = path.string() + ": row " + std::to_string(r + 1);
        if (rows[r].size() != header.size())
            fail(errc::parse_error, context + ": expected 9 fields");
        ReportEntry e;
        e.tool = rows[r][0];
        e.model = rows[r][1];
        e.dataset = rows[r][2];
        if (rows[r][3] == "references")
            e.mode = ScenarioMode::morphs_as_references;
        else if (rows[r][3] == "probes")
            e.mode = ScenarioMode::morphs_as_probes;
        else
            fail(errc::parse_error, context + ": unknown mode '" + rows[r][3] + "'");
        e.report.threshold = csv::parse_double(rows[r][4], context);
        e.report.fmr_at_threshold = csv::parse_double(rows[r][5], context);
        e.report.fnmr_at_threshold = csv::parse_double(rows[r][6], context);
        e.report.mmpmr = csv::parse_double(rows[r][7], context);
        e.report.n_morphs = csv::parse_long(rows[r][8], context);
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace morphkit
