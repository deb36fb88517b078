#include "socbench/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "socbench/error.hpp"

namespace socbench {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

}  // namespace

std::string_view to_string(AttackPhase phase) {
    switch (phase) {
        case AttackPhase::reconnaissance: return "reconnaissance";
        case AttackPhase::exploitation: return "exploitation";
        case AttackPhase::delivery: return "delivery";
        case AttackPhase::control: return "control";
    }
    return "reconnaissance";
}

AttackPhase phase_from_string(std::string_view text) {
    const std::string t = lower(text);
    if (t == "reconnaissance" || t == "recon") return AttackPhase::reconnaissance;
    if (t == "exploitation" || t == "exploit") return AttackPhase::exploitation;
    if (t == "delivery") return AttackPhase::delivery;
    if (t == "control" || t == "c2" || t == "cnc" || t == "command_and_control")
        return AttackPhase::control;
    fail(ErrorCode::invalid_argument, "unknown attack phase '" + std::string(text) + "'");
}

std::string_view to_string(Question question) {
    switch (question) {
        case Question::recon: return "recon";
        case Question::exploit: return "exploit";
        case Question::delivery_control: return "delivery_control";
    }
    return "recon";
}

Question question_from_string(std::string_view text) {
    const std::string t = lower(text);
    if (t == "recon") return Question::recon;
    if (t == "exploit") return Question::exploit;
    if (t == "delivery_control" || t == "delivery") return Question::delivery_control;
    fail(ErrorCode::invalid_argument, "unknown question key '" + std::string(text) + "'");
}

std::string canonical_label(std::string_view raw) {
    std::string collapsed;
    bool pending_space = false;
    for (unsigned char ch : raw) {
        if (std::isspace(ch)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) collapsed.push_back(' ');
        pending_space = false;
        collapsed.push_back(static_cast<char>(std::tolower(ch)));
    }
    if (collapsed == "na" || collapsed == "n/a") return {};

    static const std::map<std::string, std::string, std::less<>> synonyms{
        {"portscan", "port scan"},
        {"weak credential", "weak credentials"},
        {"remote coded execution", "remote code execution"},
        {"remote code exec.", "remote code execution"},
        {"remote code exec", "remote code execution"},
        {"rce", "remote code execution"},
        {"none of them", "none"},
        {"no action observed", "none"},
        {"network lateral movement", "lateral movement"},
        {"denial of service attack", "denial of service"},
        {"http request", "http requests"},
    };
    if (auto it = synonyms.find(collapsed); it != synonyms.end()) return it->second;
    return collapsed;
}

const std::vector<std::string>& vocabulary(Question question) {
    static const std::vector<std::string> recon{
        "username enumeration", "port scan", "sip scan", "web application vulnerability scan",
        "none", "other"};
    static const std::vector<std::string> exploit{
        "sql injection", "weak credentials", "dns remote command execution",
        "poor web server configuration", "remote code execution", "none", "other"};
    static const std::vector<std::string> delivery{
        "data exfiltration", "enumerating smb shares", "http requests", "denial of service",
        "web server path traversal", "ntp amplification", "lateral movement", "none"};
    switch (question) {
        case Question::recon: return recon;
        case Question::exploit: return exploit;
        case Question::delivery_control: return delivery;
    }
    return recon;
}

bool is_known_label(Question question, std::string_view canonical) {
    const auto& vocab = vocabulary(question);
    return std::find(vocab.begin(), vocab.end(), canonical) != vocab.end();
}

}  // namespace socbench
