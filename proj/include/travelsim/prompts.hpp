#pragma once

namespace travelsim::maop::prompts {

// Prompt templates, version-pinned so runs are reproducible. Placeholders in
// {braces} are substituted verbatim.
inline constexpr const char* kPromptVersion = "v1";

inline constexpr const char* kStrategistSystem =
    "You are a travel planning strategist. You never write the plan yourself; "
    "you study the traveler's context and prepare the ground for a planner.";

inline constexpr const char* kDecomposePrompt =
    "Study the planning context below, then decompose the planning request "
    "into the distinct aspects a planner must consider (preferences, budget, "
    "stamina, spatial layout, scheduling, and anything else the context "
    "raises). For each aspect give one line of concise guidance telling the "
    "planner how to analyze it.\n"
    "\n"
    "Respond with exactly one fenced block in this form:\n"
    "```aspects\n"
    "1. <short aspect title> :: <one-line guidance>\n"
    "2. <short aspect title> :: <one-line guidance>\n"
    "```\n"
    "\n"
    "--- CONTEXT ---\n"
    "{context}\n"
    "--- REQUEST ---\n"
    "{request}\n";

inline constexpr const char* kRoutePrompt =
    "Below are candidate planning aspects gathered from several analyses. "
    "Select and merge them into a coherent planning blueprint of at most "
    "{max_aspects} aspects, ordered so that each aspect builds on the "
    "previous ones. Every blueprint aspect must cite the candidate numbers "
    "it draws from.\n"
    "\n"
    "Respond with exactly one fenced block in this form:\n"
    "```blueprint\n"
    "1. <aspect title> :: <guidance for the planner> :: sources=<n,n>\n"
    "```\n"
    "\n"
    "--- CANDIDATE ASPECTS ---\n"
    "{aspects}\n";

inline constexpr const char* kPlannerSystem =
    "You are a travel planner. Analyze the journey context aspect by aspect "
    "as instructed, then produce the final plan when asked.\n"
    "\n"
    "--- CONTEXT ---\n"
    "{context}\n";

inline constexpr const char* kAspectTurnPrompt =
    "Aspect {index}: {aspect}\n"
    "Guidance: {guidance}\n"
    "Analyze the context from this aspect only. Keep earlier aspects in mind "
    "but do not write the plan yet.";

inline constexpr const char* kFormatTurnPrompt =
    "Now integrate the analysis so far and produce the final plan as a single "
    "fenced JSON block with this schema:\n"
    "```json\n"
    "{\"city\": str, \"days\": int, \"hotel\": str, \"origin_terminal\": str, "
    "\"traveler_ref\": str, \"entries\": [{\"day\": int, \"start_time\": \"HH:MM\", "
    "\"end_time\": \"HH:MM\", \"location\": str, \"activity\": "
    "\"transit|rest|dine|sightsee\", \"guidance\": str}]}\n"
    "```\n"
    "The journey must start and end at the origin terminal, middle days must "
    "begin and end at the hotel, and every sightseeing entry needs a guidance "
    "text drawn from the blog posts.";

inline constexpr const char* kReformatPrompt =
    "The previous answer could not be parsed. Respond again with only the "
    "fenced JSON block, no other text.";

inline constexpr const char* kNaiveAspectPrompt =
    "--- CONTEXT ---\n"
    "{context}\n"
    "\n"
    "Analyze the travel planning context from this single aspect.\n"
    "Aspect: {aspect}\n"
    "Guidance: {guidance}\n";

inline constexpr const char* kNaiveSynthesisPrompt =
    "--- CONTEXT ---\n"
    "{context}\n"
    "\n"
    "Here are independent analyses of the journey, one per aspect:\n"
    "{analyses}\n"
    "\n"
    "Integrate them into one final plan. {format_instruction}";

inline constexpr const char* kLongHorizonPrompt =
    "--- CONTEXT ---\n"
    "{context}\n"
    "\n"
    "{guidance}\n"
    "Think step by step, then produce the travel plan. {format_instruction}";

// Traveler-side prompts (simulation policy and feedback evaluation).

inline constexpr const char* kPolicySystem =
    "You are role-playing the traveler described below, moving through a "
    "simulated journey. At each step, think briefly from the traveler's "
    "perspective, then output exactly one JSON decision object.\n"
    "Decision formats:\n"
    "{\"decision\": \"transit\", \"departure\": \"...\", \"destination\": \"...\", "
    "\"transport mode\": \"...\", \"arrival time\": \"xx:xx\", \"remaining stamina\": 0.0, "
    "\"total expense\": 0.0, \"next planned location\": \"...\"}\n"
    "{\"decision\": \"rest\", \"end time\": \"xx:xx\", \"remaining stamina\": 0.0, "
    "\"total expense\": 0.0, \"next planned location\": \"...\"}\n"
    "{\"decision\": \"dine\", \"end time\": \"xx:xx\", \"remaining stamina\": 0.0, "
    "\"total expense\": 0.0, \"next planned location\": \"...\"}\n"
    "{\"decision\": \"sightsee\", \"end time\": \"xx:xx\", \"remaining stamina\": 0.0, "
    "\"total expense\": 0.0, \"next planned location\": \"...\"}\n"
    "{\"decision\": \"day_end\"}\n";

inline constexpr const char* kEvaluatorPrompt =
    "You just finished this part of the journey ({granularity}). Reflect as "
    "the traveler, then rate the experience on five 0-100 scales and answer "
    "with one JSON object:\n"
    "{\"ex\": 0, \"it\": 0, \"ar\": 0, \"st\": 0, \"co\": 0, \"commentary\": \"...\"}\n";

}  // namespace travelsim::maop::prompts
