// morphkit command-line front end: batch workflows over plain files.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <morphkit/morphkit.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace morphkit;

namespace {

ScenarioMode parse_mode(const std::string& mode)
{
    if (mode == "references" || mode == "refs")
        return ScenarioMode::morphs_as_references;
    if (mode == "probes")
        return ScenarioMode::morphs_as_probes;
    fail(errc::parse_error, "mode must be 'references' or 'probes', got '" + mode + "'");
}

MmpmrRule parse_rule(const std::string& rule)
{
    if (rule == "min")
        return MmpmrRule::min;
    if (rule == "any")
        return MmpmrRule::any;
    fail(errc::parse_error, "rule must be 'min' or 'any', got '" + rule + "'");
}

int cmd_pairs(const std::string& manifest_path, const std::string& protocol_path,
              bool all_combinations, const std::string& out_path)
{
    const auto records = load_manifest(manifest_path);
    std::vector<MorphPair> pairs;
    if (!protocol_path.empty()) {
        pairs = import_external_protocol(protocol_path, records);
    } else {
        PairConstraints constraints;
        constraints.all_combinations = all_combinations;
        pairs = generate_pairs(records, constraints);
    }
    write_pair_list(pairs, out_path);
    if (pairs.empty())
        std::cerr << "warning: no pairs satisfy the constraints\n";
    std::cout << pairs.size() << " pairs -> " << out_path << "\n";
    return 0;
}

int cmd_morph(const std::string& pairs_path, double alpha, const std::string& out_dir, int jobs)
{
    const auto pairs = load_pair_list(pairs_path);
    const auto results = batch_morph(pairs, alpha, out_dir, jobs);
    std::size_t ok = 0;
    for (const auto& res : results)
        ok += res.ok ? 1 : 0;
    std::cout << ok << "/" << results.size() << " morphs written to " << out_dir << "\n";
    if (ok != results.size())
        std::cerr << "warning: " << (results.size() - ok)
                  << " pair(s) failed; see morphs.csv for details\n";
    return 0;
}

int cmd_latent_morph(const std::string& a_path, const std::string& b_path, int index_a,
                     int index_b, double alpha, int width, int height, std::uint64_t seed,
                     const std::string& out_path)
{
    const auto load_one = [](const std::string& path, int index) {
        const auto rows = load_latents(path);
        if (index < 0 || index >= static_cast<int>(rows.size()))
            fail(errc::parse_error,
                 path + ": row index " + std::to_string(index) + " out of range");
        return rows[index];
    };
    const LatentVector wa = load_one(a_path, index_a);
    const LatentVector wb = load_one(b_path, index_b);
    const LinearDecoderBackend backend(wa.space_tag, static_cast<int>(wa.values.size()), width,
                                       height, seed);
    write_image(latent_morph(backend, wa, wb, alpha), out_path, format_for_path(out_path));
    std::cout << "latent morph (" << wa.space_tag << ", alpha=" << alpha << ") -> " << out_path
              << "\n";
    return 0;
}

int cmd_score(const std::string& embeddings_path, const std::string& manifest_path,
              const std::string& morphs_path, const std::string& mode_name, int enroll,
              const std::string& out_path)
{
    const ScenarioMode mode = parse_mode(mode_name);
    const auto embeddings = load_embeddings(embeddings_path);
    const auto records = load_manifest(manifest_path);
    const auto morphs = morphs_path.empty() ? std::vector<MorphInfo>{}
                                            : load_morph_table(morphs_path);
    const auto references = build_scenario_references(embeddings, records, morphs, mode, enroll);
    const auto pairing = enumerate_pairings(records, morphs, mode, enroll);
    const auto rows = score_comparisons(references, embeddings, pairing);
    save_scores(rows, out_path);
    std::cout << rows.size() << " comparisons (" << scenario_mode_name(mode) << " mode) -> "
              << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& scores_path, const std::string& mode_name, double target_fmr,
                 const std::string& rule_name, const std::string& tool, const std::string& model,
                 const std::string& dataset, const std::string& out_path)
{
    ScenarioConfig config;
    config.mode = parse_mode(mode_name);
    config.target_fmr = target_fmr;
    config.mmpmr_rule = parse_rule(rule_name);

    const auto rows = load_scores(scores_path);
    const ScoreSet set = assemble_scenario(rows, config);
    const EvalReport report = evaluate(set, config);

    const ReportDocument doc = emit_report({{tool, model, dataset, config.mode, report}});
    std::ofstream out(out_path, std::ios::trunc);
    if (!out)
        fail(errc::io_failure, out_path + ": cannot open for writing");
    out << doc.csv_text;

    std::cout << "mode=" << scenario_mode_name(config.mode)
              << " threshold=" << csv::format_double(report.threshold)
              << " fmr=" << csv::format_double(report.fmr_at_threshold)
              << " fnmr=" << csv::format_double(report.fnmr_at_threshold)
              << " mmpmr=" << csv::format_double(report.mmpmr)
              << " (rule=" << mmpmr_rule_name(report.rule) << ", morphs=" << report.n_morphs
              << ")\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_csv,
               const std::string& out_text)
{
    std::vector<ReportEntry> entries;
    for (const auto& path : inputs)
        for (auto& entry : load_report_rows(path))
            entries.push_back(std::move(entry));
    const ReportDocument doc = emit_report(entries);
    if (!out_csv.empty()) {
        std::ofstream out(out_csv, std::ios::trunc);
        if (!out)
            fail(errc::io_failure, out_csv + ": cannot open for writing");
        out << doc.csv_text;
    }
    if (!out_text.empty()) {
        std::ofstream out(out_text, std::ios::trunc);
        if (!out)
            fail(errc::io_failure, out_text + ": cannot open for writing");
        out << doc.table_text;
    }
    std::cout << doc.table_text;
    return 0;
}

// ---------------------------------------------------------------------------
// demo: fully synthetic end-to-end fixture

double unit_rand(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Raster demo_face(std::uint64_t seed, int size)
{
    std::mt19937_64 rng(seed);
    const double skin_r = 140.0 + 80.0 * unit_rand(rng);
    const double skin_g = 100.0 + 80.0 * unit_rand(rng);
    const double skin_b = 80.0 + 80.0 * unit_rand(rng);
    const double bg = 40.0 + 60.0 * unit_rand(rng);
    const double cx = size * (0.45 + 0.1 * unit_rand(rng));
    const double cy = size * (0.45 + 0.1 * unit_rand(rng));
    const double rx = size * (0.28 + 0.08 * unit_rand(rng));
    const double ry = size * (0.33 + 0.08 * unit_rand(rng));

    Raster img(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = (x - cx) / rx, dy = (y - cy) / ry;
            const bool face = dx * dx + dy * dy <= 1.0;
            const double shade = 1.0 - 0.25 * (dx * dx + dy * dy);
            img.at(x, y, 0) = quantize_channel(face ? skin_r * shade : bg + 0.3 * y);
            img.at(x, y, 1) = quantize_channel(face ? skin_g * shade : bg + 0.2 * x);
            img.at(x, y, 2) = quantize_channel(face ? skin_b * shade : bg);
        }

    const auto disc = [&](double px, double py, double radius, double r, double g, double b) {
        for (int y = std::max(0, static_cast<int>(py - radius - 1));
             y <= std::min(size - 1, static_cast<int>(py + radius + 1)); ++y)
            for (int x = std::max(0, static_cast<int>(px - radius - 1));
                 x <= std::min(size - 1, static_cast<int>(px + radius + 1)); ++x)
                if ((x - px) * (x - px) + (y - py) * (y - py) <= radius * radius) {
                    img.at(x, y, 0) = quantize_channel(r);
                    img.at(x, y, 1) = quantize_channel(g);
                    img.at(x, y, 2) = quantize_channel(b);
                }
    };
    disc(cx - rx * 0.45, cy - ry * 0.25, size * 0.04, 30, 30, 40);  // eyes
    disc(cx + rx * 0.45, cy - ry * 0.25, size * 0.04, 30, 30, 40);
    disc(cx, cy + ry * 0.45, size * 0.05, 120, 40, 50);             // mouth
    return img;
}

std::vector<Point2> demo_landmarks(std::uint64_t seed, int size)
{
    std::mt19937_64 rng(seed);
    const double cx = size * (0.45 + 0.1 * unit_rand(rng));
    const double cy = size * (0.45 + 0.1 * unit_rand(rng));
    const double rx = size * (0.28 + 0.08 * unit_rand(rng));
    const double ry = size * (0.33 + 0.08 * unit_rand(rng));
    std::vector<Point2> pts;
    for (int k = 0; k < 8; ++k) {
        const double t = 2.0 * 3.14159265358979323846 * k / 8.0;
        pts.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    pts.push_back({cx - rx * 0.45, cy - ry * 0.25}); // left eye
    pts.push_back({cx + rx * 0.45, cy - ry * 0.25}); // right eye
    pts.push_back({cx, cy + ry * 0.05});             // nose
    pts.push_back({cx, cy + ry * 0.45});             // mouth
    for (auto& p : pts) {
        p.x = std::clamp(p.x, 0.0, size - 1.0);
        p.y = std::clamp(p.y, 0.0, size - 1.0);
    }
    return pts;
}

std::vector<double> demo_base_vector(std::mt19937_64& rng, int dim)
{
    std::vector<double> v(dim);
    for (auto& x : v)
        x = unit_rand(rng) * 2.0 - 1.0;
    return v;
}

int cmd_demo(const std::string& out_dir, std::uint64_t seed, int jobs, int n_subjects,
             int images_per_subject, int size)
{
    const fs::path root = out_dir;
    fs::create_directories(root / "images");
    fs::create_directories(root / "landmarks");

    // Synthetic roster: half male / half female, one ethnicity, a third of
    // the subjects wearing glasses so the both-glasses exclusion is exercised.
    std::vector<std::vector<std::string>> manifest{{"subject_id", "image_id", "gender",
                                                    "ethnicity", "glasses", "image_path",
                                                    "landmarks_path"}};
    for (int s = 0; s < n_subjects; ++s) {
        const std::string subject = "s" + std::to_string(s + 1);
        const std::string gender = s < n_subjects / 2 ? "m" : "f";
        const bool glasses = s % 3 == 2;
        for (int i = 0; i < images_per_subject; ++i) {
            const std::string image_id = subject + "_" + std::to_string(i);
            const std::uint64_t face_seed = seed * 1000003ULL + s * 131ULL;
            const std::uint64_t jitter_seed = face_seed + i + 1;

            Raster img = demo_face(face_seed, size);
            // per-image brightness variation so images of one subject differ
            std::mt19937_64 jitter(jitter_seed);
            const int delta = static_cast<int>(unit_rand(jitter) * 20.0) - 10;
            for (auto& px : img.pixels)
                px = static_cast<std::uint8_t>(std::clamp(px + delta, 0, 255));

            const fs::path image_path = root / "images" / (image_id + ".png");
            const fs::path lm_path = root / "landmarks" / (image_id + ".txt");
            write_image(img, image_path, ImageFormat::png);

            auto pts = demo_landmarks(face_seed, size);
            for (auto& p : pts) {
                p.x = std::clamp(p.x + (unit_rand(jitter) - 0.5), 0.0, size - 1.0);
                p.y = std::clamp(p.y + (unit_rand(jitter) - 0.5), 0.0, size - 1.0);
            }
            std::ofstream lm(lm_path, std::ios::trunc);
            for (const auto& p : pts)
                lm << csv::format_double(p.x) << " " << csv::format_double(p.y) << "\n";

            manifest.push_back({subject, image_id, gender, "synthetic", glasses ? "1" : "0",
                                image_path.string(), lm_path.string()});
        }
    }
    csv::write_file(root / "manifest.csv", manifest);

    const auto records = load_manifest(root / "manifest.csv");
    const auto pairs = generate_pairs(records);
    write_pair_list(pairs, root / "pairs.csv");
    std::cout << "demo: " << records.size() << " images, " << pairs.size() << " pairs\n";

    const auto pair_entries = load_pair_list(root / "pairs.csv");
    const auto results = batch_morph(pair_entries, 0.5, root / "morphs", jobs);
    std::size_t ok = 0;
    for (const auto& res : results)
        ok += res.ok ? 1 : 0;
    std::cout << "demo: " << ok << "/" << results.size() << " morphs\n";
    if (ok != results.size())
        for (const auto& res : results)
            if (!res.ok)
                std::cerr << "demo: morph " << res.output << " failed: " << res.message << "\n";

    // Synthetic embeddings: per-subject base direction, genuine images close
    // to it, morph embeddings midway between their contributors' bases.
    const int dim = 32;
    std::map<std::string, std::vector<double>> base_of_subject;
    std::map<std::string, int> subject_index;
    for (const auto& rec : records)
        if (!subject_index.count(rec.subject_id)) {
            const int index = static_cast<int>(subject_index.size());
            subject_index[rec.subject_id] = index;
            std::mt19937_64 rng(seed * 7919ULL + index * 271ULL);
            base_of_subject[rec.subject_id] = demo_base_vector(rng, dim);
        }

    std::vector<Embedding> embeddings;
    int image_counter = 0;
    for (const auto& rec : records) {
        std::mt19937_64 rng(seed * 104729ULL + (++image_counter) * 37ULL);
        Embedding e;
        e.image_id = rec.image_id;
        e.model_tag = "demo-net";
        e.values = base_of_subject[rec.subject_id];
        for (auto& v : e.values)
            v += (unit_rand(rng) - 0.5) * 0.06;
        embeddings.push_back(std::move(e));
    }
    const auto morph_table = load_morph_table(root / "morphs" / "morphs.csv");
    std::map<std::string, std::string> subject_of_image;
    for (const auto& rec : records)
        subject_of_image[rec.image_id] = rec.subject_id;
    int morph_counter = 0;
    for (const auto& morph : morph_table) {
        std::mt19937_64 rng(seed * 224737ULL + (++morph_counter) * 53ULL);
        const auto& base_a = base_of_subject[subject_of_image.at(morph.image_id_a)];
        const auto& base_b = base_of_subject[subject_of_image.at(morph.image_id_b)];
        // uneven mixing plus noise so not every morph clears the threshold
        const double w = 0.3 + 0.4 * unit_rand(rng);
        Embedding e;
        e.image_id = morph.morph_id;
        e.model_tag = "demo-net";
        e.values.resize(dim);
        for (int k = 0; k < dim; ++k)
            e.values[k] = w * base_a[k] + (1.0 - w) * base_b[k] + (unit_rand(rng) - 0.5) * 0.35;
        embeddings.push_back(std::move(e));
    }
    save_embeddings(embeddings, root / "embeddings.csv");

    std::vector<ReportEntry> entries;
    for (const ScenarioMode mode :
         {ScenarioMode::morphs_as_references, ScenarioMode::morphs_as_probes}) {
        const auto references =
            build_scenario_references(embeddings, records, morph_table, mode, 1);
        const auto pairing = enumerate_pairings(records, morph_table, mode, 1);
        const auto rows = score_comparisons(references, embeddings, pairing);
        save_scores(rows, root / (std::string("scores_") + scenario_mode_name(mode) + ".csv"));

        ScenarioConfig config;
        config.mode = mode;
        const ScoreSet set = assemble_scenario(rows, config);
        entries.push_back({"landmark", "demo-net", "demo", mode, evaluate(set, config)});
    }

    const ReportDocument doc = emit_report(entries);
    std::ofstream(root / "report.csv", std::ios::trunc) << doc.csv_text;
    std::ofstream(root / "report.txt", std::ios::trunc) << doc.table_text;
    std::cout << doc.table_text;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"morphkit: landmark face morphing, morph protocols, and "
                 "face-recognition vulnerability metrics"};
    app.require_subcommand(1);

    // pairs
    auto* pairs = app.add_subcommand("pairs", "Generate or import a morph-pair protocol");
    std::string pairs_manifest, pairs_protocol, pairs_out;
    bool pairs_all = false;
    pairs->add_option("--manifest", pairs_manifest, "Subject manifest CSV")->required();
    pairs->add_option("--protocol", pairs_protocol,
                      "External pairing protocol CSV (image_id_a,image_id_b)");
    pairs->add_flag("--all-combinations", pairs_all,
                    "Pair every image combination instead of one image per subject");
    pairs->add_option("--out", pairs_out, "Output pair-list CSV")->required();

    // morph
    auto* morph_cmd = app.add_subcommand("morph", "Morph every pair in a pair list");
    std::string morph_pairs, morph_out;
    double morph_alpha = 0.5;
    int morph_jobs = 1;
    morph_cmd->add_option("--pairs", morph_pairs, "Pair-list CSV")->required();
    morph_cmd->add_option("--alpha", morph_alpha, "Blend weight for subject A")
        ->default_val(0.5)
        ->check(CLI::Range(0.0, 1.0));
    morph_cmd->add_option("--out-dir", morph_out, "Output directory")->required();
    morph_cmd->add_option("--jobs", morph_jobs, "Worker threads")
        ->default_val(1)
        ->check(CLI::PositiveNumber);

    // latent-morph
    auto* latent = app.add_subcommand("latent-morph",
                                      "Interpolate two latent vectors and synthesize with the "
                                      "bundled linear decoder backend");
    std::string latent_a, latent_b, latent_out;
    int latent_ia = 0, latent_ib = 0, latent_w = 64, latent_h = 64;
    double latent_alpha = 0.5;
    std::uint64_t latent_seed = 7;
    latent->add_option("--a", latent_a, "Latent CSV for subject A")->required();
    latent->add_option("--b", latent_b, "Latent CSV for subject B")->required();
    latent->add_option("--index-a", latent_ia, "Row index in --a")->default_val(0);
    latent->add_option("--index-b", latent_ib, "Row index in --b")->default_val(0);
    latent->add_option("--alpha", latent_alpha, "Blend weight for subject A")
        ->default_val(0.5)
        ->check(CLI::Range(0.0, 1.0));
    latent->add_option("--width", latent_w, "Decoder output width")->default_val(64);
    latent->add_option("--height", latent_h, "Decoder output height")->default_val(64);
    latent->add_option("--seed", latent_seed, "Decoder seed")->default_val(7);
    latent->add_option("--out", latent_out, "Output image (PNG or PPM)")->required();

    // score
    auto* score = app.add_subcommand("score", "Score all scenario comparisons from embeddings");
    std::string score_embeddings, score_manifest, score_morphs, score_mode, score_out;
    int score_enroll = 1;
    score->add_option("--embeddings", score_embeddings, "Embedding CSV")->required();
    score->add_option("--manifest", score_manifest, "Subject manifest CSV")->required();
    score->add_option("--morphs", score_morphs, "Morph manifest CSV from the morph step");
    score->add_option("--mode", score_mode, "Attack mode: references|probes")->required();
    score->add_option("--enroll", score_enroll, "Images enrolled per identity")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    score->add_option("--out", score_out, "Output score CSV")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Compute FMR/FNMR/MMPMR at the FMR target");
    std::string eval_scores, eval_mode, eval_rule = "min", eval_tool = "landmark",
                eval_model = "unknown", eval_dataset = "unknown", eval_out;
    double eval_target = 0.001;
    eval->add_option("--scores", eval_scores, "Score CSV")->required();
    eval->add_option("--mode", eval_mode, "Attack mode: references|probes")->required();
    eval->add_option("--target-fmr", eval_target, "FMR operating point")
        ->default_val(0.001);
    eval->add_option("--rule", eval_rule, "MMPMR acceptance rule: min|any")->default_val("min");
    eval->add_option("--tool", eval_tool, "Morphing tool tag")->default_val("landmark");
    eval->add_option("--model", eval_model, "Face recognition model tag")
        ->default_val("unknown");
    eval->add_option("--dataset", eval_dataset, "Dataset tag")->default_val("unknown");
    eval->add_option("--out", eval_out, "Output report CSV")->required();

    // report
    auto* report = app.add_subcommand("report", "Merge evaluation rows into a combined report");
    std::vector<std::string> report_in;
    std::string report_csv, report_text;
    report->add_option("--in", report_in, "Input report CSV (repeatable)")->required();
    report->add_option("--out-csv", report_csv, "Combined CSV output");
    report->add_option("--out-text", report_text, "Aligned text table output");

    // demo
    auto* demo = app.add_subcommand("demo", "Run the whole pipeline on synthetic data");
    std::string demo_out;
    std::uint64_t demo_seed = 42;
    int demo_jobs = 2, demo_subjects = 6, demo_images = 3, demo_size = 48;
    demo->add_option("--out", demo_out, "Output directory")->required();
    demo->add_option("--seed", demo_seed, "Deterministic seed")->default_val(42);
    demo->add_option("--jobs", demo_jobs, "Worker threads for morphing")
        ->default_val(2)
        ->check(CLI::PositiveNumber);
    demo->add_option("--subjects", demo_subjects, "Synthetic subject count")
        ->default_val(6)
        ->check(CLI::Range(2, 50));
    demo->add_option("--images", demo_images, "Images per subject")
        ->default_val(3)
        ->check(CLI::Range(2, 10));
    demo->add_option("--size", demo_size, "Image side length in pixels")
        ->default_val(48)
        ->check(CLI::Range(16, 512));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(pairs))
            return cmd_pairs(pairs_manifest, pairs_protocol, pairs_all, pairs_out);
        if (app.got_subcommand(morph_cmd))
            return cmd_morph(morph_pairs, morph_alpha, morph_out, morph_jobs);
        if (app.got_subcommand(latent))
            return cmd_latent_morph(latent_a, latent_b, latent_ia, latent_ib, latent_alpha,
                                    latent_w, latent_h, latent_seed, latent_out);
        if (app.got_subcommand(score))
            return cmd_score(score_embeddings, score_manifest, score_morphs, score_mode,
                             score_enroll, score_out);
        if (app.got_subcommand(eval))
            return cmd_evaluate(eval_scores, eval_mode, eval_target, eval_rule, eval_tool,
                                eval_model, eval_dataset, eval_out);
        if (app.got_subcommand(report))
            return cmd_report(report_in, report_csv, report_text);
        if (app.got_subcommand(demo))
            return cmd_demo(demo_out, demo_seed, demo_jobs, demo_subjects, demo_images,
                            demo_size);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
