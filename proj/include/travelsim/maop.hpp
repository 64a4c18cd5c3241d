#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "travelsim/plan.hpp"
#include "travelsim/spatial.hpp"

namespace travelsim::maop {

// --- Chat client contract ----------------------------------------------------

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct SamplingParams {
    double temperature = 0.7;
    uint64_t seed = 0;
    int max_tokens = 4096;
};

struct ChatResponse {
    std::string text;
    std::string reasoning;  // stored but never parsed
};

class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual ChatResponse complete(const std::vector<ChatMessage>& messages,
                                  const SamplingParams& params) = 0;
};

// --- Pipeline types ----------------------------------------------------------

struct AspectGuidance {
    std::string aspect;    // short title, non-empty
    std::string guidance;  // concise instruction, non-empty
    int sample_id = 0;     // which strategist sample produced it
};

struct Blueprint {
    std::vector<AspectGuidance> aspects;  // dialogue order, <= max_aspects
    // blueprint aspect title -> contributing raw aspect titles
    std::map<std::string, std::vector<std::string>> provenance;
};

struct ContextDocument {
    std::string profile_text;
    std::string hotel_info;
    std::string poi_posts;
    std::string intra_cluster_info;
    std::string inter_cluster_info;

    std::string render() const;  // deterministic five-section text
};

struct TranscriptTurn {
    std::string role;
    std::string content;
    int aspect_index = -1;  // which blueprint aspect the turn analyzed, -1 otherwise
    int approx_tokens = 0;  // whitespace-delimited word count of the content
};

TranscriptTurn make_turn(std::string role, std::string content, int aspect_index = -1);

struct ChatTranscript {
    std::vector<TranscriptTurn> turns;

    int planner_turns() const;  // assistant turns
    nlohmann::json to_json() const;
};

struct PipelineConfig {
    int max_aspects = 8;
    int n_samples = 1;
    int max_inflight = 1;  // concurrent sampling/per-aspect calls
    SamplingParams sampling;
    std::vector<std::string> warnings;  // filled by operations, in call order
};

// --- Operations ----------------------------------------------------------------

// Deterministic rendering of the five long-context sections; empty inputs get
// an explicit empty marker.
ContextDocument assemble_context(const std::string& profile_text, const std::string& hotel_info,
                                 const std::map<std::string, std::string>& poi_posts,
                                 const std::vector<spatial::RouteResult>& routes,
                                 const std::vector<spatial::BearingResult>& bearings);

// Samples the strategist n times and unions the parsed aspect-guidance pairs,
// deduplicated by case-folded title. Unparseable samples are skipped with a
// warning; all samples unparseable is an error.
std::vector<AspectGuidance> decompose(const ContextDocument& context, const std::string& request,
                                      ChatClient& client, PipelineConfig& config);

// One routing call merging raw aspects into an ordered blueprint of at most
// max_aspects entries, each with non-empty provenance. Overlong responses are
// truncated with a warning.
Blueprint route(const std::vector<AspectGuidance>& aspects, ChatClient& client,
                PipelineConfig& config);

struct PlanningOutcome {
    Plan plan;
    ChatTranscript transcript;
};

// Aspect-aware multi-turn dialogue: one turn per blueprint aspect with shared
// history, then a formatting turn parsed into a Plan. One reformat retry.
PlanningOutcome plan_maop(const Blueprint& blueprint, const ContextDocument& context,
                          ChatClient& client, PipelineConfig& config,
                          const PoiIndex* pois = nullptr);

// Naive wide-horizon baseline: each aspect analyzed in an independent
// single-turn call, then one synthesis call.
PlanningOutcome plan_naive_wide(const ContextDocument& context,
                                const std::vector<AspectGuidance>& aspects, ChatClient& client,
                                PipelineConfig& config, const PoiIndex* pois = nullptr);

// Zero-shot long-horizon baseline: a single call with context plus guidance.
PlanningOutcome plan_long_horizon(const ContextDocument& context, const std::string& guidance,
                                  ChatClient& client, PipelineConfig& config,
                                  const PoiIndex* pois = nullptr);

// Parsing helpers (exposed for tests).
std::vector<AspectGuidance> parse_aspect_block(const std::string& text, int sample_id);
std::optional<std::string> extract_json_block(const std::string& text);

}  // namespace travelsim::maop
