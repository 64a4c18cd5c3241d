#include "travelsim/maop.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <set>
#include <sstream>

#include "travelsim/prompts.hpp"

namespace travelsim::maop {

namespace {

std::string substitute(std::string text, const std::map<std::string, std::string>& vars) {
    for (const auto& [key, value] : vars) {
        const std::string token = "{" + key + "}";
        size_t pos = 0;
        while ((pos = text.find(token, pos)) != std::string::npos) {
            text.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return text;
}

std::string fold_title(const std::string& title) {
    std::string out;
    for (unsigned char c : title)
        if (!std::isspace(c)) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

constexpr const char* kEmptyMarker = "(none provided)";

std::string section(const std::string& title, const std::string& body) {
    return "## " + title + "\n" + (body.empty() ? kEmptyMarker : body) + "\n";
}

// Returns the body of the first ```tag ... ``` fence, if present.
std::optional<std::string> fenced_block(const std::string& text, const std::string& tag) {
    const std::string open = "```" + tag;
    size_t start = text.find(open);
    if (start == std::string::npos) return std::nullopt;
    start += open.size();
    if (start < text.size() && text[start] == '\n') ++start;
    const size_t end = text.find("```", start);
    if (end == std::string::npos) return std::nullopt;
    return text.substr(start, end - start);
}

struct NumberedLine {
    int number = 0;
    std::vector<std::string> fields;  // split on "::", trimmed
};

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<NumberedLine> parse_numbered_lines(const std::string& block) {
    std::vector<NumberedLine> out;
    std::istringstream in(block);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        size_t dot = line.find('.');
        if (dot == std::string::npos) continue;
        NumberedLine nl;
        try {
            nl.number = std::stoi(line.substr(0, dot));
        } catch (...) {
            continue;
        }
        std::string rest = line.substr(dot + 1);
        size_t pos = 0;
        while (true) {
            const size_t sep = rest.find("::", pos);
            if (sep == std::string::npos) {
                nl.fields.push_back(trim(rest.substr(pos)));
                break;
            }
            nl.fields.push_back(trim(rest.substr(pos, sep - pos)));
            pos = sep + 2;
        }
        out.push_back(std::move(nl));
    }
    return out;
}

}  // namespace

std::string ContextDocument::render() const {
    // Section order is fixed; rendering the same inputs twice is byte-identical.
    return section("Traveler Profile & Preferences", profile_text) +
           section("Hotel Information", hotel_info) + section("POI Blog Posts", poi_posts) +
           section("Intra-Cluster Routes", intra_cluster_info) +
           section("Inter-Cluster Directions", inter_cluster_info);
}

TranscriptTurn make_turn(std::string role, std::string content, int aspect_index) {
    TranscriptTurn turn{std::move(role), std::move(content), aspect_index, 0};
    bool in_word = false;
    for (unsigned char c : turn.content) {
        const bool space = std::isspace(c);
        if (!space && !in_word) ++turn.approx_tokens;
        in_word = !space;
    }
    return turn;
}

int ChatTranscript::planner_turns() const {
    return static_cast<int>(
        std::count_if(turns.begin(), turns.end(),
                      [](const TranscriptTurn& t) { return t.role == "assistant"; }));
}

nlohmann::json ChatTranscript::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const TranscriptTurn& t : turns)
        arr.push_back({{"role", t.role},
                       {"content", t.content},
                       {"aspect_index", t.aspect_index},
                       {"approx_tokens", t.approx_tokens}});
    return arr;
}

ContextDocument assemble_context(const std::string& profile_text, const std::string& hotel_info,
                                 const std::map<std::string, std::string>& poi_posts,
                                 const std::vector<spatial::RouteResult>& routes,
                                 const std::vector<spatial::BearingResult>& bearings) {
    ContextDocument doc;
    doc.profile_text = profile_text;
    doc.hotel_info = hotel_info;

    std::ostringstream posts;
    for (const auto& [poi, text] : poi_posts) posts << "### " << poi << "\n" << text << "\n";
    doc.poi_posts = posts.str();

    std::ostringstream intra;
    intra.precision(2);
    intra << std::fixed;
    for (const spatial::RouteResult& r : routes) {
        intra << "Route: ";
        for (size_t i = 0; i < r.path.size(); ++i) {
            if (i) intra << " -> ";
            intra << r.path[i];
        }
        intra << " (" << r.total_distance << " km total";
        for (size_t i = 0; i < r.step_distances.size(); ++i)
            intra << (i ? ", " : "; legs: ") << r.step_distances[i];
        intra << ")\n";
    }
    doc.intra_cluster_info = intra.str();

    std::ostringstream inter;
    inter.precision(2);
    inter << std::fixed;
    for (const spatial::BearingResult& b : bearings)
        inter << b.target << ": " << b.direction << " of the hotel, " << b.distance_km << " km\n";
    doc.inter_cluster_info = inter.str();
    return doc;
}

std::vector<AspectGuidance> parse_aspect_block(const std::string& text, int sample_id) {
    auto block = fenced_block(text, "aspects");
    if (!block) return {};
    std::vector<AspectGuidance> out;
    for (const NumberedLine& nl : parse_numbered_lines(*block)) {
        if (nl.fields.size() < 2 || nl.fields[0].empty() || nl.fields[1].empty()) continue;
        out.push_back(AspectGuidance{nl.fields[0], nl.fields[1], sample_id});
    }
    return out;
}

std::vector<AspectGuidance> decompose(const ContextDocument& context, const std::string& request,
                                      ChatClient& client, PipelineConfig& config) {
    if (config.n_samples < 1) throw ArgumentError("decompose: n_samples must be >= 1");

    const std::vector<ChatMessage> messages{
        {"system", prompts::kStrategistSystem},
        {"user", substitute(prompts::kDecomposePrompt,
                            {{"context", context.render()}, {"request", request}})}};

    std::vector<std::string> responses(static_cast<size_t>(config.n_samples));
    if (config.max_inflight > 1) {
        std::vector<std::future<std::string>> futures;
        for (int i = 0; i < config.n_samples; ++i) {
            futures.push_back(std::async(std::launch::async, [&client, &messages, &config] {
                return client.complete(messages, config.sampling).text;
            }));
            if (static_cast<int>(futures.size()) == config.max_inflight ||
                i + 1 == config.n_samples) {
                const size_t base = static_cast<size_t>(i) + 1 - futures.size();
                for (size_t f = 0; f < futures.size(); ++f) responses[base + f] = futures[f].get();
                futures.clear();
            }
        }
    } else {
        for (int i = 0; i < config.n_samples; ++i)
            responses[static_cast<size_t>(i)] = client.complete(messages, config.sampling).text;
    }

    std::vector<AspectGuidance> merged;
    std::set<std::string> seen;
    int parsed_samples = 0;
    for (int i = 0; i < config.n_samples; ++i) {
        auto aspects = parse_aspect_block(responses[static_cast<size_t>(i)], i);
        if (aspects.empty()) {
            config.warnings.push_back("decompose: sample " + std::to_string(i) +
                                      " had no parseable aspects");
            continue;
        }
        ++parsed_samples;
        for (AspectGuidance& a : aspects)
            if (seen.insert(fold_title(a.aspect)).second) merged.push_back(std::move(a));
    }
    if (parsed_samples == 0) throw PipelineError("decompose: no sample produced parseable aspects");
    return merged;
}

Blueprint route(const std::vector<AspectGuidance>& aspects, ChatClient& client,
                PipelineConfig& config) {
    if (aspects.empty()) throw ArgumentError("route: no aspects to route");

    std::ostringstream listing;
    for (size_t i = 0; i < aspects.size(); ++i)
        listing << (i + 1) << ". " << aspects[i].aspect << " :: " << aspects[i].guidance << "\n";

    const std::vector<ChatMessage> messages{
        {"system", prompts::kStrategistSystem},
        {"user", substitute(prompts::kRoutePrompt,
                            {{"max_aspects", std::to_string(config.max_aspects)},
                             {"aspects", listing.str()}})}};
    const ChatResponse response = client.complete(messages, config.sampling);

    auto block = fenced_block(response.text, "blueprint");
    if (!block) throw PipelineError("route: response lacks a blueprint block");

    Blueprint bp;
    for (const NumberedLine& nl : parse_numbered_lines(*block)) {
        if (nl.fields.size() < 2 || nl.fields[0].empty() || nl.fields[1].empty()) continue;
        AspectGuidance a{nl.fields[0], nl.fields[1], 0};

        std::vector<std::string> sources;
        if (nl.fields.size() >= 3 && nl.fields[2].rfind("sources=", 0) == 0) {
            std::istringstream nums(nl.fields[2].substr(8));
            std::string tok;
            while (std::getline(nums, tok, ',')) {
                try {
                    const size_t idx = static_cast<size_t>(std::stoul(trim(tok)));
                    if (idx >= 1 && idx <= aspects.size())
                        sources.push_back(aspects[idx - 1].aspect);
                } catch (...) {
                }
            }
        }
        if (sources.empty()) sources.push_back(a.aspect);  // self-attributed fallback
        bp.provenance[a.aspect] = std::move(sources);
        bp.aspects.push_back(std::move(a));
    }
    if (bp.aspects.empty()) throw PipelineError("route: blueprint block held no aspects");

    if (static_cast<int>(bp.aspects.size()) > config.max_aspects) {
        config.warnings.push_back("route: blueprint truncated from " +
                                  std::to_string(bp.aspects.size()) + " to " +
                                  std::to_string(config.max_aspects) + " aspects");
        for (size_t i = static_cast<size_t>(config.max_aspects); i < bp.aspects.size(); ++i)
            bp.provenance.erase(bp.aspects[i].aspect);
        bp.aspects.resize(static_cast<size_t>(config.max_aspects));
    }
    return bp;
}

std::optional<std::string> extract_json_block(const std::string& text) {
    if (auto block = fenced_block(text, "json")) return block;
    // Bare JSON object: first '{' through last '}'.
    const size_t open = text.find('{');
    const size_t close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        return std::nullopt;
    return text.substr(open, close - open + 1);
}

namespace {

// Asks for the plan, retrying once with a reformat instruction. On success
// the assistant turns are appended to the transcript.
Plan request_plan(std::vector<ChatMessage>& dialogue, ChatTranscript& transcript,
                  ChatClient& client, PipelineConfig& config, const PoiIndex* pois) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        const ChatResponse response = client.complete(dialogue, config.sampling);
        dialogue.push_back({"assistant", response.text});
        transcript.turns.push_back(make_turn("assistant", response.text));

        auto block = extract_json_block(response.text);
        if (block) {
            try {
                return parse_plan_text(*block, pois);
            } catch (const std::exception& e) {
                config.warnings.push_back(std::string("plan parse failed: ") + e.what());
            }
        } else {
            config.warnings.push_back("plan response had no JSON block");
        }
        if (attempt == 0) {
            dialogue.push_back({"user", prompts::kReformatPrompt});
            transcript.turns.push_back(make_turn("user", prompts::kReformatPrompt));
        }
    }
    throw PipelineError("final plan unparseable after retry");
}

}  // namespace

PlanningOutcome plan_maop(const Blueprint& blueprint, const ContextDocument& context,
                          ChatClient& client, PipelineConfig& config, const PoiIndex* pois) {
    if (blueprint.aspects.empty()) throw ArgumentError("plan_maop: empty blueprint");

    PlanningOutcome out;
    std::vector<ChatMessage> dialogue{
        {"system", substitute(prompts::kPlannerSystem, {{"context", context.render()}})}};
    out.transcript.turns.push_back(make_turn("system", dialogue[0].content));

    for (size_t i = 0; i < blueprint.aspects.size(); ++i) {
        const AspectGuidance& a = blueprint.aspects[i];
        const std::string turn = substitute(prompts::kAspectTurnPrompt,
                                            {{"index", std::to_string(i + 1)},
                                             {"aspect", a.aspect},
                                             {"guidance", a.guidance}});
        dialogue.push_back({"user", turn});
        out.transcript.turns.push_back(make_turn("user", turn, static_cast<int>(i)));

        const ChatResponse response = client.complete(dialogue, config.sampling);
        dialogue.push_back({"assistant", response.text});
        out.transcript.turns.push_back(make_turn("assistant", response.text, static_cast<int>(i)));
    }

    dialogue.push_back({"user", prompts::kFormatTurnPrompt});
    out.transcript.turns.push_back(make_turn("user", prompts::kFormatTurnPrompt));
    try {
        out.plan = request_plan(dialogue, out.transcript, client, config, pois);
    } catch (const PipelineError&) {
        throw PipelineError("plan_maop: final plan unparseable after retry; transcript has " +
                            std::to_string(out.transcript.turns.size()) + " turns:\n" +
                            out.transcript.to_json().dump());
    }
    return out;
}

PlanningOutcome plan_naive_wide(const ContextDocument& context,
                                const std::vector<AspectGuidance>& aspects, ChatClient& client,
                                PipelineConfig& config, const PoiIndex* pois) {
    if (aspects.empty()) throw ArgumentError("plan_naive_wide: no aspects");

    PlanningOutcome out;
    const std::string rendered = context.render();

    // Independent single-turn analyses; no shared history between aspects.
    std::vector<std::string> analyses(aspects.size());
    auto analyze_one = [&](size_t i) {
        const std::vector<ChatMessage> messages{
            {"user", substitute(prompts::kNaiveAspectPrompt, {{"context", rendered},
                                                              {"aspect", aspects[i].aspect},
                                                              {"guidance", aspects[i].guidance}})}};
        return client.complete(messages, config.sampling).text;
    };
    if (config.max_inflight > 1) {
        std::vector<std::future<std::string>> futures;
        size_t next = 0;
        while (next < aspects.size()) {
            const size_t batch = std::min(static_cast<size_t>(config.max_inflight),
                                          aspects.size() - next);
            for (size_t b = 0; b < batch; ++b)
                futures.push_back(std::async(std::launch::async, analyze_one, next + b));
            for (size_t b = 0; b < batch; ++b) analyses[next + b] = futures[b].get();
            futures.clear();
            next += batch;
        }
    } else {
        for (size_t i = 0; i < aspects.size(); ++i) analyses[i] = analyze_one(i);
    }

    for (size_t i = 0; i < aspects.size(); ++i) {
        out.transcript.turns.push_back(
            make_turn("user", "aspect: " + aspects[i].aspect, static_cast<int>(i)));
        out.transcript.turns.push_back(make_turn("assistant", analyses[i], static_cast<int>(i)));
    }

    std::ostringstream joined;
    for (size_t i = 0; i < aspects.size(); ++i)
        joined << "### " << aspects[i].aspect << "\n" << analyses[i] << "\n";

    std::vector<ChatMessage> dialogue{
        {"user", substitute(prompts::kNaiveSynthesisPrompt,
                            {{"context", rendered},
                             {"analyses", joined.str()},
                             {"format_instruction", prompts::kFormatTurnPrompt}})}};
    out.transcript.turns.push_back(make_turn("user", dialogue[0].content));
    out.plan = request_plan(dialogue, out.transcript, client, config, pois);
    return out;
}

PlanningOutcome plan_long_horizon(const ContextDocument& context, const std::string& guidance,
                                  ChatClient& client, PipelineConfig& config,
                                  const PoiIndex* pois) {
    PlanningOutcome out;
    std::vector<ChatMessage> dialogue{
        {"user", substitute(prompts::kLongHorizonPrompt,
                            {{"context", context.render()},
                             {"guidance", guidance},
                             {"format_instruction", prompts::kFormatTurnPrompt}})}};
    out.transcript.turns.push_back(make_turn("user", dialogue[0].content));
    out.plan = request_plan(dialogue, out.transcript, client, config, pois);
    return out;
}

}  // namespace travelsim::maop
