#pragma once

#include <cstdlib>
#include <string>

namespace webforge {

// Endpoint and workspace settings, fillable from FORGE_* environment
// variables and overridable by CLI flags.
struct ForgeConfig {
    std::string policy_url;
    std::string policy_token;
    std::string judge_url;
    std::string judge_token;
    std::string llm_url;
    std::string llm_token;
    std::string workdir = ".";

    static ForgeConfig from_env() {
        ForgeConfig cfg;
        auto read = [](const char* name, std::string& into) {
            if (const char* v = std::getenv(name); v && *v) into = v;
        };
        read("FORGE_POLICY_URL", cfg.policy_url);
        read("FORGE_POLICY_TOKEN", cfg.policy_token);
        read("FORGE_JUDGE_URL", cfg.judge_url);
        read("FORGE_JUDGE_TOKEN", cfg.judge_token);
        read("FORGE_LLM_URL", cfg.llm_url);
        read("FORGE_LLM_TOKEN", cfg.llm_token);
        read("FORGE_WORKDIR", cfg.workdir);
        return cfg;
    }
};

} // namespace webforge
