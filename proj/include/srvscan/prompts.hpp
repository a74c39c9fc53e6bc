#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "srvscan/core.hpp"

namespace srvscan {

// Prompt templates, versioned with the tool. Each follows the same four-part
// structure: Role Playing, Task Definition, Step-by-Step Analysis, Output
// Format. Inputs are embedded verbatim at the %...% placeholders and JSON is
// demanded only in the final analysis tier so earlier tiers keep free-form
// reasoning.
inline constexpr const char* k_prompt_version = "v1";

inline constexpr const char* k_prompt_key_variables = R"PROMPT(## Role Playing
You are a smart contract security auditor skilled in identifying and mitigating signature verification vulnerabilities in Solidity code.

## Task Definition
Extract the variable names related to signature verification (ecrecover()) from the code below.

%initial_code_blocks%

## Step-by-Step Analysis
Tier 1: Determine if the code above implements signature verification. If it does not, say so and explain briefly.
Tier 2: If the code does implement signature verification, extract all state variables, parameters and locals involved in producing or checking the recovered signer.
Tier 3: Filter the Tier 2 list down to the variables that actually affect signature verification, discarding variables that only participate in unrelated bookkeeping.

## Output Format
Reason step by step through the tiers in plain text. Then, in the final round only, output exactly one JSON object and nothing after it:
{"signature_verification": true|false, "key_variables": ["name", ...], "reason": "one sentence"}
)PROMPT";

inline constexpr const char* k_prompt_sanitized_variables = R"PROMPT(## Role Playing
You are a smart contract security auditor specializing in taint analysis of signature verification flows.

## Task Definition
Identify the sanitized variables relevant to %sanitized_variable_type% in the code below. A variable is sanitized when a check neutralizes it for the given replay class.

%provided_code%

## Step-by-Step Analysis
Tier 1: Search for all variables that are checked during signature verification. If none are found, explain why.
Tier 2: Using the identification rules below, keep the key variables whose dependencies reach the verification.
%sanitized_variable_identification_rules%
Tier 3: If Tier 2 produced variables, apply the sanitization methods below and decide, per replay class, which variables are sanitized during verification.
%sanitization_methods%

## Output Format
Reason step by step through the tiers in plain text. Then, in the final round only, output exactly one JSON object and nothing after it:
{"sanitized_variables": {"X-CRA": ["name", ...], "X-PRA": [...], "CASR": [...], "SSMI": [...], "SMA": [...]}}
Only include keys for the requested classes.
)PROMPT";

inline constexpr const char* k_prompt_function_sequence = R"PROMPT(## Role Playing
You are a smart contract security auditor reviewing statically derived signature replay warnings.

## Task Definition
The following warnings are associated with signature replay attacks:
%warnings%
Analyze the business process related to function calls involving these warnings within the code below.

%provided_code%

## Step-by-Step Analysis
Tier 1: Analyze the signature verification process behind each warning and decide whether signature reuse is possible. Retract warnings that are not exploitable.
Tier 2: For each confirmed warning, output all sub-business flows that involve the warning function, starting from an externally callable entry point.
Tier 3: Business flows must only list functions within the contract itself, ignoring calls to other contracts or interfaces, as well as events.

## Output Format
Reason step by step through the tiers in plain text. Then, in the final round only, output exactly one JSON object and nothing after it, mapping each confirmed warning function to its ordered call sequences:
{"warnings": {"functionName": [["entryPoint", "functionName"], ...], ...}}
A retracted warning maps to an empty list.
)PROMPT";

// Per-class identification rules and sanitization methods used to fill the
// %sanitized_variable_identification_rules% / %sanitization_methods% slots.
inline const std::map<SrvType, std::pair<std::string, std::string>>&
srv_rule_table() {
  static const std::map<SrvType, std::pair<std::string, std::string>> k = {
      {SrvType::XCra,
       {"variables contributing to the signed message hash",
        "equality comparison against block.chainid, or inclusion of "
        "block.chainid in the hashed payload (directly or through a domain "
        "separator helper)"}},
      {SrvType::XPra,
       {"variables contributing to the signed message hash",
        "equality comparison against address(this), or inclusion of "
        "address(this) in the hashed payload (directly or through a domain "
        "separator helper)"}},
      {SrvType::Casr,
       {"variables binding the verifying account identity",
        "comparison with, or hash inclusion of, the identity/account address "
        "parameter inside isValidSignature or an identity-parameterized "
        "verifier"}},
      {SrvType::Ssmi,
       {"state variables tracking signature usage",
        "a state mapping keyed by a signature-derived value that is guard-read "
        "before the authorized effect and written afterwards, or a monotonic "
        "nonce consumed by the signed hash"}},
      {SrvType::Sma,
       {"the v and s signature components",
        "v restricted to exactly 27 or 28; s bounded above by the secp256k1 "
        "half order"}},
  };
  return k;
}

namespace detail {
inline std::string replace_all(std::string text, const std::string& from,
                               const std::string& to) {
  std::size_t at = 0;
  while ((at = text.find(from, at)) != std::string::npos) {
    text.replace(at, from.size(), to);
    at += to.size();
  }
  return text;
}
}  // namespace detail

inline std::string render_prompt_key_variables(const std::string& code_block) {
  return detail::replace_all(k_prompt_key_variables, "%initial_code_blocks%",
                             code_block);
}

inline std::string render_prompt_sanitized_variables(
    const std::string& slice_text, const std::set<SrvType>& types) {
  std::string type_list, rules, methods;
  for (SrvType t : all_srv_types()) {
    if (!types.count(t)) continue;
    if (!type_list.empty()) type_list += ", ";
    type_list += std::string(srv_name(t));
    const auto& [rule, method] = srv_rule_table().at(t);
    rules += "- " + std::string(srv_name(t)) + ": " + rule + "\n";
    methods += "- " + std::string(srv_name(t)) + ": " + method + "\n";
  }
  std::string out = k_prompt_sanitized_variables;
  out = detail::replace_all(out, "%sanitized_variable_type%", type_list);
  out = detail::replace_all(out, "%provided_code%", slice_text);
  out = detail::replace_all(out, "%sanitized_variable_identification_rules%", rules);
  out = detail::replace_all(out, "%sanitization_methods%", methods);
  return out;
}

inline std::string render_prompt_function_sequence(
    const std::vector<std::string>& warning_lines, const std::string& slice_text) {
  std::string warnings;
  for (const auto& w : warning_lines) warnings += "- " + w + "\n";
  std::string out = k_prompt_function_sequence;
  out = detail::replace_all(out, "%warnings%", warnings);
  out = detail::replace_all(out, "%provided_code%", slice_text);
  return out;
}

}  // namespace srvscan
