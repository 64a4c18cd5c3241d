// travelsim: batch front door for spatial preprocessing, plan generation,
// simulation and scoring. One subcommand per pipeline stage, files as the
// interchange. Exit codes: 0 success, 2 usage/input, 3 pipeline failure,
// 4 simulation abort.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "travelsim/adapters.hpp"
#include "travelsim/digest.hpp"
#include "travelsim/maop.hpp"
#include "travelsim/remote.hpp"
#include "travelsim/scoring.hpp"
#include "travelsim/spatial.hpp"
#include "travelsim/timeutil.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace travelsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitSimAbort = 4;

json file_digest(const fs::path& file) {
    return json(fnv1a64_hex(adapters::read_text_file(file)));
}

// Anchor categories stay out of clustering; they are route endpoints.
std::vector<POI> clusterable_pois(const PoiIndex& index) {
    std::vector<POI> out;
    for (const POI& p : index.all())
        if (p.category != PoiCategory::hotel && p.category != PoiCategory::station)
            out.push_back(p);
    return out;
}

const POI* unique_poi_of(const PoiIndex& index, PoiCategory category) {
    const POI* found = nullptr;
    for (const POI& p : index.all()) {
        if (p.category != category) continue;
        if (found) return nullptr;  // ambiguous
        found = &p;
    }
    return found;
}

struct PreprocessArgs {
    std::string pois_file;
    std::string hotel;
    int days = 1;
    uint64_t seed = 0;
    std::string out_dir = ".";
};

json cluster_report(const PoiIndex& index, const POI& hotel, int days, uint64_t seed,
                    bool* clamped) {
    const std::vector<POI> candidates = clusterable_pois(index);
    if (candidates.empty()) throw ArgumentError("no clusterable POIs in the dataset");

    const int k = spatial::choose_k(days, static_cast<int>(candidates.size()));
    if (clamped) *clamped = k != days;
    const auto clusters = spatial::cluster_pois(candidates, k, seed);

    json out{{"schema_version", 1}, {"k", k}, {"seed", seed}, {"hotel", hotel.id}};
    json arr = json::array();
    for (const auto& cluster : clusters) {
        std::vector<spatial::NamedPoint> points{{hotel.name, hotel.location}};
        for (const std::string& id : cluster.members) {
            const POI* p = index.by_id(id);
            points.push_back({p->name, p->location});
        }
        const spatial::RouteResult route =
            spatial::find_shortest_route(points, hotel.name, hotel.name);
        const auto bearings = spatial::directions_distances(
            hotel.location, {{"cluster " + std::to_string(cluster.id), cluster.centroid}});

        json cj{{"id", cluster.id},
                {"members", cluster.members},
                {"centroid", {{"lat", cluster.centroid.lat}, {"lon", cluster.centroid.lon}}},
                {"route",
                 {{"path", route.path},
                  {"total_distance_km", route.total_distance},
                  {"step_distances_km", route.step_distances}}},
                {"bearing_from_hotel",
                 {{"target", bearings[0].target},
                  {"direction", bearings[0].direction},
                  {"distance_km", bearings[0].distance_km},
                  {"bearing_deg", bearings[0].bearing_deg}}}};
        arr.push_back(std::move(cj));
    }
    out["clusters"] = std::move(arr);
    return out;
}

int cmd_preprocess(const PreprocessArgs& args) {
    PoiIndex index(adapters::load_poi_file(args.pois_file));
    const POI* hotel = index.resolve(args.hotel);
    if (!hotel) throw ReferenceError("hotel '" + args.hotel + "' not found in the POI file");

    bool clamped = false;
    json report = cluster_report(index, *hotel, args.days, args.seed, &clamped);
    report["provenance"] = {{"seed", args.seed}, {"inputs", {{"pois", file_digest(args.pois_file)}}}};
    adapters::write_text_file(fs::path(args.out_dir) / "cluster_report.json", report.dump(2) + "\n");
    if (clamped)
        std::cerr << "note: k clamped to " << report["k"] << " for " << args.days << " day(s)\n";
    return kExitOk;
}

// --- plan ---------------------------------------------------------------------

struct PlanArgs {
    std::string fixture_dir;
    bool live = false;
    std::string method = "maop";
    std::string profile_id;
    int days = 1;
    std::string hotel, terminal, request;
    std::string aspects_file;   // naive_wide
    std::string guidance;       // long_horizon
    std::string responses_file; // overrides the bundle's canned chat responses
    int samples = 1;
    int max_aspects = 8;
    int jobs = 1;
    uint64_t seed = 0;
    std::string out_dir = ".";
};

maop::ContextDocument build_context(const adapters::FixtureBundle& bundle,
                                    const TravelerProfile& profile, const POI& hotel, int days,
                                    uint64_t seed) {
    std::ostringstream profile_text;
    profile_text << to_string(profile.type_label) << " (" << profile.group_size()
                 << " traveler(s)); preferences: " << profile.preferences
                 << "; budget (minor units): " << profile.budget_minor
                 << "; initial stamina: " << profile.initial_stamina;

    std::ostringstream hotel_info;
    hotel_info << hotel.name << " at (" << hotel.location.lat << ", " << hotel.location.lon << ")";

    std::map<std::string, std::string> posts;
    for (const POI& p : bundle.pois().all())
        if (p.blog_excerpt) posts[p.name] = *p.blog_excerpt;

    const std::vector<POI> candidates = clusterable_pois(bundle.pois());
    std::vector<spatial::RouteResult> routes;
    std::vector<spatial::BearingResult> bearings;
    if (!candidates.empty()) {
        const int k = spatial::choose_k(days, static_cast<int>(candidates.size()));
        for (const auto& cluster : spatial::cluster_pois(candidates, k, seed)) {
            std::vector<spatial::NamedPoint> points{{hotel.name, hotel.location}};
            for (const std::string& id : cluster.members) {
                const POI* p = bundle.pois().by_id(id);
                points.push_back({p->name, p->location});
            }
            routes.push_back(spatial::find_shortest_route(points, hotel.name, hotel.name));
            auto b = spatial::directions_distances(
                hotel.location, {{"cluster " + std::to_string(cluster.id), cluster.centroid}});
            bearings.push_back(b[0]);
        }
    }
    return maop::assemble_context(profile_text.str(), hotel_info.str(), posts, routes, bearings);
}

remote::RemoteConfig remote_config_from_env(const char* url_var, const char* model_var) {
    remote::RemoteConfig config;
    const char* url = std::getenv(url_var);
    if (!url) throw ArgumentError(std::string("live mode needs ") + url_var);
    std::string u(url);
    if (u.rfind("http://", 0) == 0) u = u.substr(7);
    const size_t slash = u.find('/');
    if (slash != std::string::npos) {
        config.path = u.substr(slash);
        u = u.substr(0, slash);
    }
    const size_t colon = u.find(':');
    if (colon != std::string::npos) {
        config.port = std::stoi(u.substr(colon + 1));
        u = u.substr(0, colon);
    } else {
        config.port = 80;
    }
    config.host = u;
    if (model_var)
        if (const char* model = std::getenv(model_var)) config.model = model;
    if (const char* cache = std::getenv("TRAVELSIM_CACHE_DIR")) config.cache_dir = cache;
    if (const char* replay = std::getenv("TRAVELSIM_REPLAY"))
        config.replay = std::string(replay) == "1";
    return config;
}

int cmd_plan(const PlanArgs& args) {
    const auto bundle = adapters::FixtureBundle::load(args.fixture_dir);
    const TravelerProfile& profile = bundle.profile(args.profile_id);

    const POI* hotel = args.hotel.empty() ? unique_poi_of(bundle.pois(), PoiCategory::hotel)
                                          : bundle.pois().resolve(args.hotel);
    const POI* terminal = args.terminal.empty()
                              ? unique_poi_of(bundle.pois(), PoiCategory::station)
                              : bundle.pois().resolve(args.terminal);
    if (!hotel) throw ArgumentError("hotel not given and not unique in the bundle");
    if (!terminal) throw ArgumentError("terminal not given and not unique in the bundle");

    std::unique_ptr<maop::ChatClient> client;
    if (args.live) {
        client = std::make_unique<remote::RemoteChatAdapter>(
            remote_config_from_env("TRAVELSIM_CHAT_URL", "TRAVELSIM_CHAT_MODEL"));
    } else if (!args.responses_file.empty()) {
        const json j = adapters::read_json_file(args.responses_file);
        std::vector<std::string> responses;
        for (const auto& r : (j.is_array() ? j : j.at("responses")))
            responses.push_back(r.get<std::string>());
        client = std::make_unique<adapters::ReplayChatClient>(std::move(responses));
    } else {
        if (bundle.chat_responses().empty())
            throw ArgumentError("fixture bundle has no chat_responses.json");
        client = std::make_unique<adapters::ReplayChatClient>(bundle.chat_responses());
    }

    maop::PipelineConfig config;
    config.max_aspects = args.max_aspects;
    config.n_samples = args.samples;
    config.max_inflight = args.jobs;
    config.sampling.seed = args.seed;

    const maop::ContextDocument context =
        build_context(bundle, profile, *hotel, args.days, args.seed);
    std::string request = args.request;
    if (request.empty())
        request = "Plan a " + std::to_string(args.days) + "-day trip for this traveler, staying at " +
                  hotel->name + ", arriving and departing via " + terminal->name + ".";

    maop::PlanningOutcome outcome;
    json blueprint_json = nullptr;
    if (args.method == "maop") {
        const auto aspects = maop::decompose(context, request, *client, config);
        const maop::Blueprint blueprint = maop::route(aspects, *client, config);
        blueprint_json = json::array();
        for (const auto& a : blueprint.aspects) {
            blueprint_json.push_back({{"aspect", a.aspect},
                                      {"guidance", a.guidance},
                                      {"sources", blueprint.provenance.at(a.aspect)}});
        }
        outcome = maop::plan_maop(blueprint, context, *client, config, &bundle.pois());
    } else if (args.method == "naive_wide") {
        std::vector<maop::AspectGuidance> aspects;
        if (!args.aspects_file.empty())
            for (const auto& a : adapters::read_json_file(args.aspects_file))
                aspects.push_back({a.at("aspect").get<std::string>(),
                                   a.at("guidance").get<std::string>(), 0});
        if (aspects.empty()) throw ArgumentError("naive_wide needs a non-empty --aspects file");
        outcome = maop::plan_naive_wide(context, aspects, *client, config, &bundle.pois());
    } else if (args.method == "long_horizon") {
        outcome = maop::plan_long_horizon(context, args.guidance, *client, config, &bundle.pois());
    } else {
        throw ArgumentError("unknown method '" + args.method + "'");
    }

    json plan_doc = serialize_plan(outcome.plan);
    adapters::write_text_file(fs::path(args.out_dir) / "plan.json", plan_doc.dump(2) + "\n");
    json transcript{{"schema_version", 1},
                    {"method", args.method},
                    {"seed", args.seed},
                    {"warnings", config.warnings},
                    {"turns", outcome.transcript.to_json()}};
    if (!args.live)
        transcript["provenance"] = {
            {"inputs",
             {{"chat_responses", file_digest(fs::path(args.fixture_dir) / "chat_responses.json")},
              {"pois", file_digest(fs::path(args.fixture_dir) / "pois.json")}}}};
    if (!blueprint_json.is_null()) transcript["blueprint"] = blueprint_json;
    adapters::write_text_file(fs::path(args.out_dir) / "transcript.json",
                              transcript.dump(2) + "\n");
    return kExitOk;
}

// --- simulate -----------------------------------------------------------------

struct SimulateArgs {
    std::string fixture_dir;
    bool live = false;
    std::vector<std::string> plan_files;
    std::string profile_id;
    std::string policy = "scripted";
    std::string decisions_file;
    bool seed_set = false;
    uint64_t seed = 0;
    int jobs = 1;
    std::string out_dir = ".";
};

int simulate_one(const SimulateArgs& args, const adapters::FixtureBundle& bundle,
                 const fs::path& plan_file, const fs::path& out_file) {
    const Plan plan = parse_plan_text(adapters::read_text_file(plan_file), &bundle.pois());
    const TravelerProfile& profile = bundle.profile(args.profile_id);

    // --live swaps in the remote map service; dining and sightseeing stay
    // fixture-backed (their sources are ingested, not queried).
    std::unique_ptr<sandbox::TransitProvider> transit =
        args.live ? std::unique_ptr<sandbox::TransitProvider>(new remote::RemoteTransitAdapter(
                        remote_config_from_env("TRAVELSIM_MAP_URL", nullptr)))
                  : bundle.transit_provider();
    auto dining = bundle.dining_provider();
    auto sightsee = bundle.sightsee_provider();
    sandbox::Providers providers{transit.get(), dining.get(), sightsee.get(), &bundle.pois()};

    std::unique_ptr<sandbox::TravelerPolicy> policy;
    if (args.policy == "scripted") {
        if (args.decisions_file.empty())
            throw ArgumentError("scripted policy needs --decisions FILE");
        policy = std::make_unique<adapters::ScriptedPolicy>(
            adapters::ScriptedPolicy::load(args.decisions_file));
    } else if (args.policy == "echo") {
        policy = std::make_unique<adapters::EchoPolicy>(plan, &bundle.pois());
    } else if (args.policy == "remote") {
        policy = std::make_unique<remote::RemotePolicy>(
            remote_config_from_env("TRAVELSIM_POLICY_URL", nullptr), profile);
    } else {
        throw ArgumentError("unknown policy '" + args.policy + "'");
    }

    sandbox::SimConfig config;
    config.seed = args.seed;

    sandbox::Trace trace = sandbox::run_simulation(plan, profile, *policy, providers, config);
    trace.provenance = {{"seed", args.seed},
                        {"policy", args.policy},
                        {"inputs", {{"plan", file_digest(plan_file)}}}};
    adapters::write_text_file(out_file, sandbox::serialize_trace(trace));
    if (trace.aborted) {
        std::cerr << "simulation aborted: " << trace.abort_reason << " (partial trace kept)\n";
        return kExitSimAbort;
    }
    return kExitOk;
}

int cmd_simulate(const SimulateArgs& args) {
    if (!args.seed_set) throw ArgumentError("simulate requires --seed");
    const auto bundle = adapters::FixtureBundle::load(args.fixture_dir);

    std::vector<fs::path> outputs;
    for (const std::string& plan_file : args.plan_files) {
        if (args.plan_files.size() == 1) {
            outputs.emplace_back(fs::path(args.out_dir) / "trace.jsonl");
        } else {
            outputs.emplace_back(fs::path(args.out_dir) /
                                 (fs::path(plan_file).stem().string() + ".trace.jsonl"));
        }
    }

    std::vector<int> results(args.plan_files.size(), kExitOk);
    if (args.jobs > 1 && args.plan_files.size() > 1) {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < args.jobs; ++t) {
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < args.plan_files.size();
                     i = next.fetch_add(1)) {
                    try {
                        results[i] = simulate_one(args, bundle, args.plan_files[i], outputs[i]);
                    } catch (const std::exception& e) {
                        std::cerr << args.plan_files[i] << ": " << e.what() << "\n";
                        results[i] = kExitInput;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    } else {
        for (size_t i = 0; i < args.plan_files.size(); ++i)
            results[i] = simulate_one(args, bundle, args.plan_files[i], outputs[i]);
    }
    return *std::max_element(results.begin(), results.end());
}

// --- score --------------------------------------------------------------------

struct ScoreArgs {
    std::string fixture_dir;
    std::vector<std::string> plan_files;
    std::vector<std::string> trace_files;
    std::string weights_file;
    int jobs = 1;
    std::string out_dir = ".";
};

int score_one(const ScoreArgs& args, const adapters::FixtureBundle& bundle,
              const metrics::PerWeights& weights, const fs::path& plan_file,
              const fs::path& trace_file, const std::string& suffix) {
    const Plan plan = parse_plan_text(adapters::read_text_file(plan_file), &bundle.pois());
    const sandbox::Trace trace =
        sandbox::parse_trace_text(adapters::read_text_file(trace_file));
    if (normalize_place(trace.city) != normalize_place(plan.city))
        throw ArgumentError("plan city '" + plan.city + "' does not match trace city '" +
                            trace.city + "'");

    const TravelerProfile& profile = bundle.profile(trace.profile_ref);
    adapters::FixtureEvaluator evaluator(bundle.evaluator_config());
    const auto feedback = scoring::collect_feedback(trace, profile, evaluator);

    std::map<std::string, std::string> posts;
    for (const POI& p : bundle.pois().all()) {
        if (!p.blog_excerpt) continue;
        posts[p.id] = *p.blog_excerpt;
        posts[p.name] = *p.blog_excerpt;
        posts[normalize_place(p.name)] = *p.blog_excerpt;
    }

    const scoring::ScoreCard card =
        scoring::compute_scorecard(plan, trace, posts, feedback, weights,
                                   metrics::rule_based_meal_judge, metrics::tf_cosine,
                                   &bundle.pois());

    json card_json = scoring::scorecard_to_json(card);
    card_json["provenance"] = {{"inputs",
                                {{"plan", file_digest(plan_file)},
                                 {"trace", file_digest(trace_file)}}},
                               {"weights",
                                {{"alpha1", weights.alpha1},
                                 {"alpha2", weights.alpha2},
                                 {"beta", weights.beta},
                                 {"gamma", weights.gamma}}}};
    adapters::write_text_file(fs::path(args.out_dir) / ("scorecard" + suffix + ".json"),
                              card_json.dump(2) + "\n");
    adapters::write_text_file(fs::path(args.out_dir) / ("report" + suffix + ".csv"),
                              scoring::scorecard_csv(card, trace.city, trace.profile_ref));
    return kExitOk;
}

int cmd_score(const ScoreArgs& args) {
    if (args.plan_files.size() != args.trace_files.size() || args.plan_files.empty())
        throw ArgumentError("score needs matching --plan and --trace lists");
    const auto bundle = adapters::FixtureBundle::load(args.fixture_dir);

    metrics::PerWeights weights;
    if (!args.weights_file.empty()) {
        const json w = adapters::read_json_file(args.weights_file);
        weights.alpha1 = w.value("alpha1", weights.alpha1);
        weights.alpha2 = w.value("alpha2", weights.alpha2);
        weights.beta = w.value("beta", weights.beta);
        weights.gamma = w.value("gamma", weights.gamma);
        weights.check();
    }

    int worst = kExitOk;
    for (size_t i = 0; i < args.plan_files.size(); ++i) {
        const std::string suffix =
            args.plan_files.size() == 1 ? "" : "_" + fs::path(args.plan_files[i]).stem().string();
        worst = std::max(worst, score_one(args, bundle, weights, args.plan_files[i],
                                          args.trace_files[i], suffix));
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"travelsim: travel-plan simulation and evaluation"};
    app.require_subcommand(1);

    PreprocessArgs pre;
    auto* preprocess = app.add_subcommand("preprocess", "cluster POIs and derive spatial context");
    preprocess->add_option("--pois", pre.pois_file, "POI dataset file")->required();
    preprocess->add_option("--hotel", pre.hotel, "hotel POI id")->required();
    preprocess->add_option("--days", pre.days, "number of travel days")->required();
    preprocess->add_option("--seed", pre.seed, "clustering seed");
    preprocess->add_option("--out", pre.out_dir, "output directory");

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "generate a plan (maop or baselines)");
    plan_cmd->add_option("--fixture", plan_args.fixture_dir, "fixture bundle directory");
    plan_cmd->add_flag("--live", plan_args.live, "use live endpoints from the environment");
    plan_cmd->add_option("--method", plan_args.method, "maop | naive_wide | long_horizon");
    plan_cmd->add_option("--profile", plan_args.profile_id, "traveler profile id")->required();
    plan_cmd->add_option("--days", plan_args.days, "journey length in days");
    plan_cmd->add_option("--hotel", plan_args.hotel, "hotel POI id");
    plan_cmd->add_option("--terminal", plan_args.terminal, "origin terminal POI id");
    plan_cmd->add_option("--request", plan_args.request, "planning request text");
    plan_cmd->add_option("--aspects", plan_args.aspects_file, "aspect file for naive_wide");
    plan_cmd->add_option("--guidance", plan_args.guidance, "guidance text for long_horizon");
    plan_cmd->add_option("--responses", plan_args.responses_file,
                         "canned chat responses overriding the bundle's");
    plan_cmd->add_option("--samples", plan_args.samples, "strategist samples for maop");
    plan_cmd->add_option("--max-aspects", plan_args.max_aspects, "blueprint aspect cap");
    plan_cmd->add_option("--jobs", plan_args.jobs, "max in-flight model calls");
    plan_cmd->add_option("--seed", plan_args.seed, "sampling seed");
    plan_cmd->add_option("--out", plan_args.out_dir, "output directory");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a plan through the sandbox");
    simulate->add_option("--fixture", sim.fixture_dir, "fixture bundle directory")->required();
    simulate->add_flag("--live", sim.live, "use live endpoints from the environment");
    simulate->add_option("--plan", sim.plan_files, "plan file(s)")->required();
    simulate->add_option("--profile", sim.profile_id, "traveler profile id")->required();
    simulate->add_option("--policy", sim.policy, "scripted | echo | remote");
    simulate->add_option("--decisions", sim.decisions_file, "scripted decision file");
    simulate->add_option("--seed", sim.seed, "simulation seed")
        ->each([&sim](const std::string&) { sim.seed_set = true; });
    simulate->add_option("--jobs", sim.jobs, "parallel simulations");
    simulate->add_option("--out", sim.out_dir, "output directory");

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "compute the scorecard for plan + trace");
    score_cmd->add_option("--fixture", score.fixture_dir, "fixture bundle directory")->required();
    score_cmd->add_option("--plan", score.plan_files, "plan file(s)")->required();
    score_cmd->add_option("--trace", score.trace_files, "trace file(s)")->required();
    score_cmd->add_option("--weights", score.weights_file, "PER weights override file");
    score_cmd->add_option("--jobs", score.jobs, "parallel scoring jobs");
    score_cmd->add_option("--out", score.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*preprocess) return cmd_preprocess(pre);
        if (*plan_cmd) return cmd_plan(plan_args);
        if (*simulate) return cmd_simulate(sim);
        if (*score_cmd) return cmd_score(score);
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
