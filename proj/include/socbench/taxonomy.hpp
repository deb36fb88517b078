#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace socbench {

/// Closed four-phase attack taxonomy, in narrative order.
enum class AttackPhase { reconnaissance = 0, exploitation = 1, delivery = 2, control = 3 };

inline constexpr std::array<AttackPhase, 4> kAllPhases{
    AttackPhase::reconnaissance, AttackPhase::exploitation, AttackPhase::delivery,
    AttackPhase::control};

std::string_view to_string(AttackPhase phase);
/// Case-insensitive; accepts the full names plus "recon", "exploit", "c2", "cnc".
AttackPhase phase_from_string(std::string_view text);

/// Report questions that are graded against expected answers.
enum class Question { recon, exploit, delivery_control };

inline constexpr std::array<Question, 3> kAllQuestions{Question::recon, Question::exploit,
                                                       Question::delivery_control};

std::string_view to_string(Question question);
Question question_from_string(std::string_view text);

/// Canonical answer label: trimmed, lower-cased, inner whitespace collapsed,
/// questionnaire spellings folded onto one form ("Weak credential" ->
/// "weak credentials", "No action observed" -> "none", ...). Empty and "NA"
/// become the empty string.
std::string canonical_label(std::string_view raw);

/// Seed vocabulary per question. Labels outside it are accepted as free text.
const std::vector<std::string>& vocabulary(Question question);
bool is_known_label(Question question, std::string_view canonical);

}  // namespace socbench
