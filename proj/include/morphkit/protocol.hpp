#pragma once

#include "csv.hpp"
#include "error.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

// Dataset manifests and morph-pair protocols. Pairing constraints: same
// gender, same ethnicity, never two glasses-wearers.

namespace morphkit {

struct SubjectRecord {
    std::string subject_id;
    std::string image_id;
    std::string gender;    // normalized lower-case
    std::string ethnicity; // normalized lower-case
    bool glasses = false;
    std::string image_path;
    std::string landmarks_path;
};

/// Unordered pair, canonicalized so a.subject_id < b.subject_id.
struct MorphPair {
    SubjectRecord a;
    SubjectRecord b;
};

struct PairConstraints {
    bool all_combinations = false; // all image pairs, not one image per subject
};

namespace detail {

inline std::string to_lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool parse_glasses(const std::string& raw, int row, const std::string& path)
{
    const std::string v = to_lower(raw);
    if (v == "1" || v == "true")
        return true;
    if (v == "0" || v == "false")
        return false;
    fail(errc::parse_error, path + ": row " + std::to_string(row)
                                + ": glasses must be one of {0,1,true,false}, got '" + raw + "'");
}

inline MorphPair make_pair(const SubjectRecord& x, const SubjectRecord& y)
{
    if (x.subject_id < y.subject_id)
        return {x, y};
    return {y, x};
}

} // namespace detail

/// Manifest CSV: subject_id,image_id,gender,ethnicity,glasses,image_path,landmarks_path.
inline std::vector<SubjectRecord> load_manifest(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    const std::vector<std::string> header{"subject_id", "image_id",   "gender",        "ethnicity",
                                          "glasses",    "image_path", "landmarks_path"};
    if (rows.empty() || rows[0] != header)
        fail(errc::parse_error, path.string() + ": bad or missing manifest header");

    std::vector<SubjectRecord> records;
    std::set<std::string> seen_images;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const int rowno = static_cast<int>(r) + 1;
        if (rows[r].size() != header.size())
            fail(errc::parse_error, path.string() + ": row " + std::to_string(rowno) + " has "
                                        + std::to_string(rows[r].size()) + " fields, expected 7");
        SubjectRecord rec;
        rec.subject_id = rows[r][0];
        rec.image_id = rows[r][1];
        rec.gender = detail::to_lower(rows[r][2]);
        rec.ethnicity = detail::to_lower(rows[r][3]);
        rec.glasses = detail::parse_glasses(rows[r][4], rowno, path.string());
        rec.image_path = rows[r][5];
        rec.landmarks_path = rows[r][6];
        if (rec.subject_id.empty() || rec.image_id.empty())
            fail(errc::parse_error,
                 path.string() + ": row " + std::to_string(rowno) + ": empty subject or image id");
        if (!seen_images.insert(rec.image_id).second)
            fail(errc::duplicate_image_id, path.string() + ": row " + std::to_string(rowno)
                                               + ": image id '" + rec.image_id + "' repeats");
        records.push_back(std::move(rec));
    }
    return records;
}

/// All cross-subject pairs satisfying the constraints: same gender, same
/// ethnicity, not both wearing glasses. By default one image per subject
/// (first by sorted image_id); deterministic sorted output.
inline std::vector<MorphPair> generate_pairs(const std::vector<SubjectRecord>& records,
                                             const PairConstraints& constraints = {})
{
    std::map<std::string, std::vector<SubjectRecord>> by_subject;
    for (const auto& rec : records)
        by_subject[rec.subject_id].push_back(rec);
    for (auto& [id, images] : by_subject)
        std::sort(images.begin(), images.end(),
                  [](const SubjectRecord& x, const SubjectRecord& y) {
                      return x.image_id < y.image_id;
                  });

    std::vector<MorphPair> pairs;
    for (auto it = by_subject.begin(); it != by_subject.end(); ++it)
        for (auto jt = std::next(it); jt != by_subject.end(); ++jt) {
            const auto& images_a = it->second;
            const auto& images_b = jt->second;
            const std::size_t na = constraints.all_combinations ? images_a.size() : 1;
            const std::size_t nb = constraints.all_combinations ? images_b.size() : 1;
            for (std::size_t i = 0; i < na; ++i)
                for (std::size_t j = 0; j < nb; ++j) {
                    const SubjectRecord& ra = images_a[i];
                    const SubjectRecord& rb = images_b[j];
                    if (ra.gender != rb.gender || ra.ethnicity != rb.ethnicity)
                        continue;
                    if (ra.glasses && rb.glasses)
                        continue;
                    pairs.push_back(detail::make_pair(ra, rb));
                }
        }

    std::sort(pairs.begin(), pairs.end(), [](const MorphPair& x, const MorphPair& y) {
        return std::tie(x.a.subject_id, x.b.subject_id, x.a.image_id, x.b.image_id)
             < std::tie(y.a.subject_id, y.b.subject_id, y.a.image_id, y.b.image_id);
    });
    return pairs;
}

/// Import a published pairing protocol: CSV rows image_id_a,image_id_b
/// resolved against the manifest. Pairs keep file order (canonicalized);
/// unresolvable rows are collected and reported together.
inline std::vector<MorphPair> import_external_protocol(const std::filesystem::path& path,
                                                       const std::vector<SubjectRecord>& records)
{
    std::map<std::string, const SubjectRecord*> by_image;
    for (const auto& rec : records)
        by_image[rec.image_id] = &rec;

    auto rows = csv::read_file(path);
    std::size_t start = 0;
    if (!rows.empty() && rows[0] == std::vector<std::string>{"image_id_a", "image_id_b"})
        start = 1;

    std::vector<MorphPair> pairs;
    std::string problems;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const std::string rowno = std::to_string(r + 1);
        if (rows[r].size() != 2) {
            problems += " row " + rowno + ": expected 2 fields;";
            continue;
        }
        const auto ia = by_image.find(rows[r][0]);
        const auto ib = by_image.find(rows[r][1]);
        if (ia == by_image.end() || ib == by_image.end()) {
            problems += " row " + rowno + ": unknown image id '"
                      + (ia == by_image.end() ? rows[r][0] : rows[r][1]) + "';";
            continue;
        }
        if (ia->second->subject_id == ib->second->subject_id) {
            problems += " row " + rowno + ": both images belong to subject '"
                      + ia->second->subject_id + "';";
            continue;
        }
        pairs.push_back(detail::make_pair(*ia->second, *ib->second));
    }
    if (!problems.empty())
        fail(errc::unknown_image_id, path.string() + ":" + problems);
    return pairs;
}

/// Emit the pair-list CSV consumed by batch_morph (ids are image ids).
inline void write_pair_list(const std::vector<MorphPair>& pairs,
                            const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows{
        {"id_a", "image_a", "landmarks_a", "id_b", "image_b", "landmarks_b"}};
    for (const auto& pair : pairs)
        rows.push_back({pair.a.image_id, pair.a.image_path, pair.a.landmarks_path,
                        pair.b.image_id, pair.b.image_path, pair.b.landmarks_path});
    csv::write_file(path, rows);
}

} // namespace morphkit
