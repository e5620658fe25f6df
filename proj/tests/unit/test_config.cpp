#include <doctest.h>

#include <cstdlib>

#include "ran/config.hpp"

using namespace ran;

namespace {

int error_line(const std::string& text)
{
    auto t = parse_toml_subset(text, "c.toml");
    if (t || t.diagnostics.empty())
        return -1;
    return t.diagnostics.front().where.line;
}

struct EnvGuard {
    std::vector<std::string> names;
    ~EnvGuard()
    {
        for (const auto& n : names)
            unsetenv(n.c_str());
    }
    void set(const std::string& name, const std::string& value)
    {
        setenv(name.c_str(), value.c_str(), 1);
        names.push_back(name);
    }
};

} // namespace

TEST_CASE("toml subset values")
{
    auto t = parse_toml_subset("# comment\nhost = \"0.0.0.0\" # trailing\nport = 9000\nverbose = true\n"
                               "data_dir = [\"a\", 'b']\n\n[judge]\nurl = \"http://x/score\"\n",
                               "c.toml");
    REQUIRE(t);
    CHECK(std::get<std::string>(t->at("host")) == "0.0.0.0");
    CHECK(std::get<long long>(t->at("port")) == 9000);
    CHECK(std::get<bool>(t->at("verbose")));
    CHECK(std::get<std::vector<std::string>>(t->at("data_dir")) == std::vector<std::string>{"a", "b"});
    CHECK(std::get<std::string>(t->at("judge.url")) == "http://x/score");
}

TEST_CASE("string escapes")
{
    auto t = parse_toml_subset("a = \"tab\\tquote\\\" hash # inside\"\n", "c.toml");
    REQUIRE(t);
    CHECK(std::get<std::string>(t->at("a")) == "tab\tquote\" hash # inside");
}

TEST_CASE("errors carry the line number")
{
    CHECK(error_line("a = 1\n[broken\n") == 2);
    CHECK(error_line("a = 1\n\njust words\n") == 3);
    CHECK(error_line("a = \"open\n") == 1);
    CHECK(error_line("a = 1\na = 2\n") == 2);
    CHECK(error_line("x = \"\"\"\nmulti\n\"\"\"\n") == 1);
    CHECK(error_line("x = 1\ny = {a = 1}\n") == 2);
    CHECK(error_line("bad key = 1\n") == 1);
    CHECK(error_line("d = 1979-05-27\n") == 1);
}

TEST_CASE("service config from toml")
{
    auto c = config_from_toml("host = \"0.0.0.0\"\nport = 9001\ndata_dir = \"/srv/data\"\nstore_dir = \"/srv/store\"\n"
                              "tier_table = \"/srv/t.yaml\"\n[judge]\nurl = \"http://j/score\"\ntimeout_seconds = 4\n");
    REQUIRE(c);
    CHECK(c->host == "0.0.0.0");
    CHECK(c->port == 9001);
    CHECK(c->data_dirs == std::vector<std::string>{"/srv/data"});
    CHECK(c->store_dir == "/srv/store");
    CHECK(c->tier_table == "/srv/t.yaml");
    CHECK(c->judge.url == "http://j/score");
    CHECK(c->judge.timeout == std::chrono::seconds(4));
}

TEST_CASE("unknown keys warn and bad types fail")
{
    auto c = config_from_toml("colour = \"red\"\n");
    REQUIRE(c);
    REQUIRE(c.diagnostics.size() == 1);
    CHECK(c.diagnostics[0].severity == Severity::warning);
    CHECK_FALSE(config_from_toml("port = \"80\"\n"));
    CHECK_FALSE(config_from_toml("port = 70000\n"));
    CHECK_FALSE(config_from_toml("[judge]\ntimeout_seconds = 0\n"));
}

TEST_CASE("defaults survive an empty file")
{
    auto c = config_from_toml("");
    REQUIRE(c);
    CHECK(c->host == "127.0.0.1");
    CHECK(c->port == 8080);
    CHECK(c->store_dir == "assessments");
}

TEST_CASE("environment overrides")
{
    EnvGuard env;
    ServiceConfig c;
    env.set("RAN_PORT", "8181");
    env.set("RAN_DATA_DIR", "/a::/b");
    env.set("RAN_STORE_DIR", "/s");
    env.set("RAN_JUDGE_URL", "http://j");
    env.set("RAN_JUDGE_TOKEN", "t");
    apply_env_overrides(c);
    CHECK(c.port == 8181);
    CHECK(c.data_dirs == std::vector<std::string>{"/a", "/b"});
    CHECK(c.store_dir == "/s");
    CHECK(c.judge.url == "http://j");
    CHECK(c.judge.token == "t");
    env.set("RAN_PORT", "80x");
    CHECK_THROWS_AS(apply_env_overrides(c), InvalidInput);
    env.set("RAN_PORT", "0");
    CHECK_THROWS_AS(apply_env_overrides(c), InvalidInput);
}
