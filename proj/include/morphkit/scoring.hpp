#pragma once

#include "csv.hpp"
#include "error.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

// Embedding ingestion and cosine-similarity scoring. Scores are stored as
// similarity (higher = better match); every threshold in this toolkit is a
// similarity threshold.

namespace morphkit {

struct Embedding {
    std::string image_id;
    std::string model_tag;
    std::vector<double> values;
};

struct ReferenceModel {
    std::string identity_id;
    std::vector<double> mean;
    int n_images = 0;
};

enum class PairingLabel { genuine, impostor, morph };

inline const char* pairing_label_name(PairingLabel label)
{
    switch (label) {
    case PairingLabel::genuine:  return "genuine";
    case PairingLabel::impostor: return "impostor";
    case PairingLabel::morph:    return "morph";
    }
    return "?";
}

inline PairingLabel parse_pairing_label(const std::string& text, const std::string& context)
{
    if (text == "genuine")
        return PairingLabel::genuine;
    if (text == "impostor")
        return PairingLabel::impostor;
    if (text == "morph")
        return PairingLabel::morph;
    fail(errc::parse_error, context + ": unknown label '" + text + "'");
}

/// One requested comparison; morph rows also carry the morph id and the
/// contributing subject the comparison targets.
struct PairingEntry {
    std::string reference_id;
    std::string probe_image_id;
    PairingLabel label = PairingLabel::genuine;
    std::string morph_id;
    std::string contrib_subject;
};

struct ScoreRow {
    PairingLabel label = PairingLabel::genuine;
    std::string reference_id;
    std::string probe_id;
    std::string morph_id;
    std::string contrib_subject;
    double score = 0.0;
};

/// Embedding CSV: image_id,model_tag,v0,...,vD-1 (constant D per model_tag).
inline std::vector<Embedding> load_embeddings(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    std::vector<Embedding> out;
    std::map<std::string, std::size_t> dim_by_model;
    std::size_t start = 0;
    if (!rows.empty() && !rows[0].empty() && rows[0][0] == "image_id")
        start = 1;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const std::string context = path.string() + ": row " + std::to_string(r + 1);
        if (rows[r].size() < 3)
            fail(errc::parse_error, context + ": expected image_id,model_tag,components");
        Embedding e;
        e.image_id = rows[r][0];
        e.model_tag = rows[r][1];
        double norm2 = 0.0;
        for (std::size_t i = 2; i < rows[r].size(); ++i) {
            const double v = csv::parse_double(rows[r][i], context);
            e.values.push_back(v);
            norm2 += v * v;
        }
        const auto [it, inserted] = dim_by_model.try_emplace(e.model_tag, e.values.size());
        if (!inserted && it->second != e.values.size())
            fail(errc::dimension_mismatch,
                 context + ": dimension " + std::to_string(e.values.size()) + " but model '"
                     + e.model_tag + "' uses " + std::to_string(it->second));
        if (norm2 == 0.0)
            fail(errc::zero_vector, context + ": all-zero embedding");
        out.push_back(std::move(e));
    }
    return out;
}

inline void save_embeddings(const std::vector<Embedding>& embeddings,
                            const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : embeddings) {
        std::vector<std::string> row{e.image_id, e.model_tag};
        for (double v : e.values)
            row.push_back(csv::format_double(v));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, rows);
}

/// Componentwise mean of the given embedding vectors.
inline ReferenceModel build_reference(const std::string& identity_id,
                                      const std::vector<Embedding>& embeddings)
{
    if (embeddings.empty())
        fail(errc::empty_set, "build_reference: no embeddings for '" + identity_id + "'");
    const std::size_t dim = embeddings[0].values.size();
    for (const auto& e : embeddings)
        if (e.values.size() != dim)
            fail(errc::dimension_mismatch, "build_reference: inconsistent dimensions for '"
                                               + identity_id + "'");
    ReferenceModel ref;
    ref.identity_id = identity_id;
    ref.n_images = static_cast<int>(embeddings.size());
    ref.mean.assign(dim, 0.0);
    for (const auto& e : embeddings)
        for (std::size_t i = 0; i < dim; ++i)
            ref.mean[i] += e.values[i];
    for (auto& v : ref.mean)
        v /= static_cast<double>(embeddings.size());
    return ref;
}

/// dot(u,v) / (|u| |v|), in [-1, 1].
inline double cosine_score(const std::vector<double>& u, const std::vector<double>& v)
{
    if (u.size() != v.size())
        fail(errc::dimension_mismatch, "cosine_score: dimension mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0)
        fail(errc::zero_vector, "cosine_score: zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

/// Score every pairing entry: cosine similarity between the reference's mean
/// vector and the probe embedding. Output order equals pairing order.
inline std::vector<ScoreRow> score_comparisons(const std::vector<ReferenceModel>& references,
                                               const std::vector<Embedding>& probes,
                                               const std::vector<PairingEntry>& pairing)
{
    std::map<std::string, const ReferenceModel*> ref_by_id;
    for (const auto& ref : references)
        ref_by_id[ref.identity_id] = &ref;
    std::map<std::string, const Embedding*> probe_by_id;
    for (const auto& e : probes)
        probe_by_id[e.image_id] = &e;

    std::vector<ScoreRow> rows;
    rows.reserve(pairing.size());
    for (const auto& entry : pairing) {
        const auto ref = ref_by_id.find(entry.reference_id);
        if (ref == ref_by_id.end())
            fail(errc::unknown_id, "score_comparisons: unknown reference '" + entry.reference_id
                                       + "'");
        const auto probe = probe_by_id.find(entry.probe_image_id);
        if (probe == probe_by_id.end())
            fail(errc::unknown_id, "score_comparisons: unknown probe '" + entry.probe_image_id
                                       + "'");
        ScoreRow row;
        row.label = entry.label;
        row.reference_id = entry.reference_id;
        row.probe_id = entry.probe_image_id;
        row.morph_id = entry.morph_id;
        row.contrib_subject = entry.contrib_subject;
        row.score = cosine_score(ref->second->mean, probe->second->values);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Score CSV: label,reference_id,probe_id,morph_id,contrib_subject,score.
inline void save_scores(const std::vector<ScoreRow>& rows, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> out{
        {"label", "reference_id", "probe_id", "morph_id", "contrib_subject", "score"}};
    for (const auto& row : rows)
        out.push_back({pairing_label_name(row.label), row.reference_id, row.probe_id,
                       row.morph_id, row.contrib_subject, csv::format_double(row.score)});
    csv::write_file(path, out);
}

inline std::vector<ScoreRow> load_scores(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    const std::vector<std::string> header{"label",    "reference_id",    "probe_id",
                                          "morph_id", "contrib_subject", "score"};
    if (rows.empty() || rows[0] != header)
        fail(errc::parse_error, path.string() + ": bad or missing score header");
    std::vector<ScoreRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::string context = path.string() + ": row " + std::to_string(r + 1);
        if (rows[r].size() != header.size())
            fail(errc::parse_error, context + ": expected 6 fields");
        ScoreRow row;
        row.label = parse_pairing_label(rows[r][0], context);
        row.reference_id = rows[r][1];
        row.probe_id = rows[r][2];
        row.morph_id = rows[r][3];
        row.contrib_subject = rows[r][4];
        row.score = csv::parse_double(rows[r][5], context);
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace morphkit
