#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <dmdecoh/errors.hpp>
#include <dmdecoh/units.hpp>

namespace dmdecoh::cli {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Value
{
    std::string text;
    bool quoted = false;
    int line = 0;
};

double to_number(const std::string& field, const Value& v)
{
    if (v.quoted)
        throw ValidationError(field, "expected a number");
    double x = 0.0;
    const char* first = v.text.data();
    const char* last = first + v.text.size();
    if (!v.text.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last)
        throw ValidationError(field, "cannot parse '" + v.text + "' as a number");
    return x;
}

std::int64_t to_integer(const std::string& field, const Value& v)
{
    const double x = to_number(field, v);
    if (x != std::floor(x) || std::abs(x) > 9.0e15)
        throw ValidationError(field, "expected an integer");
    return static_cast<std::int64_t>(x);
}

bool to_bool(const std::string& field, const Value& v)
{
    if (v.text == "true")
        return true;
    if (v.text == "false")
        return false;
    throw ValidationError(field, "expected true or false");
}

using Setter = std::function<void(RunConfig&, const std::string&, const Value&)>;

auto number(double RunConfig::*member, double scale = 1.0)
{
    return Setter([=](RunConfig& c, const std::string& f, const Value& v) {
        c.*member = to_number(f, v) * scale;
    });
}

template <class Get>
Setter number_in(Get get, double scale = 1.0)
{
    return [=](RunConfig& c, const std::string& f, const Value& v) {
        get(c) = to_number(f, v) * scale;
    };
}

const std::map<std::string, std::map<std::string, Setter>>& schema()
{
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"scenario",
         {
             {"M", number_in([](RunConfig& c) -> double& { return c.scenario.M; })},
             {"m", number_in([](RunConfig& c) -> double& { return c.scenario.m; })},
             {"alphaM", number_in([](RunConfig& c) -> double& { return c.scenario.alphaM; })},
             {"alphaDM", number_in([](RunConfig& c) -> double& { return c.scenario.alphaDM; })},
             {"rhoDM", number_in([](RunConfig& c) -> double& { return c.scenario.rhoDM; },
                                 units::GeV_per_cm3)},
             {"vBar", number_in([](RunConfig& c) -> double& { return c.scenario.vBar; },
                                units::km_s)},
             {"vSun", number_in([](RunConfig& c) -> double& { return c.scenario.vSun; },
                                units::km_s)},
             {"vEsc", number_in([](RunConfig& c) -> double& { return c.scenario.vEsc; },
                                units::km_s)},
         }},
        {"experiment",
         {
             {"name",
              [](RunConfig& c, const std::string&, const Value& v) {
                  c.experiment = find_experiment(v.text);
              }},
             {"R", number_in([](RunConfig& c) -> double& { return c.experiment.radius; },
                             units::nm)},
             {"N", number_in([](RunConfig& c) -> double& { return c.experiment.nucleons; })},
             {"A", number_in([](RunConfig& c) -> double& { return c.experiment.massNumber; })},
             {"dx", number_in([](RunConfig& c) -> double& { return c.experiment.separation; },
                              units::nm)},
             {"T", number_in([](RunConfig& c) -> double& { return c.experiment.exposure; },
                             units::ms)},
             {"Gamma",
              number_in([](RunConfig& c) -> double& { return c.experiment.countRate; })},
             {"visibility",
              number_in([](RunConfig& c) -> double& { return c.experiment.visibility; })},
             {"d300K",
              number_in([](RunConfig& c) -> double& { return c.experiment.rmsDisplacement300K; },
                        units::angstrom)},
             {"space",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.experiment.space = to_bool(f, v);
              }},
         }},
        {"site",
         {
             {"latitude", number_in([](RunConfig& c) -> double& { return c.site.latitude; })},
             {"axisAzimuth",
              number_in([](RunConfig& c) -> double& { return c.site.axisAzimuth; })},
             {"axisAltitude",
              number_in([](RunConfig& c) -> double& { return c.site.axisAltitude; })},
             {"windDeclination",
              number_in([](RunConfig& c) -> double& { return c.site.windDeclination; })},
             {"shielding",
              [](RunConfig& c, const std::string&, const Value& v) {
                  c.site.shielding = parse_shielding(v.text);
              }},
         }},
        {"plan",
         {
             {"runLength", number_in([](RunConfig& c) -> double& { return c.plan.runLength; })},
             {"etaDM", number_in([](RunConfig& c) -> double& { return c.plan.etaDM; })},
             {"etaRes", number_in([](RunConfig& c) -> double& { return c.plan.etaRes; })},
             {"channel",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  if (v.text == "decoherence")
                      c.plan.channel = Channel::decoherence;
                  else if (v.text == "phase-shift")
                      c.plan.channel = Channel::phase_shift;
                  else
                      throw ValidationError(f, "expected decoherence or phase-shift");
              }},
         }},
        {"atmosphere",
         {
             {"mAtm", number_in([](RunConfig& c) -> double& { return c.atmosphere.mAtm; },
                                units::GeV)},
             {"pAtm", number_in([](RunConfig& c) -> double& { return c.atmosphere.pAtm; })},
             {"gE", number_in([](RunConfig& c) -> double& { return c.atmosphere.gE; })},
             {"TAtm", number_in([](RunConfig& c) -> double& { return c.atmosphere.TAtm; })},
             {"TCrust", number_in([](RunConfig& c) -> double& { return c.atmosphere.TCrust; })},
         }},
        {"stats",
         {
             {"sTilde", number_in([](RunConfig& c) -> double& { return c.stats.sTilde; })},
             {"gammaVis", number_in([](RunConfig& c) -> double& { return c.stats.gammaVis; })},
             {"B0", number_in([](RunConfig& c) -> double& { return c.stats.B0; })},
             {"deltaB", number_in([](RunConfig& c) -> double& { return c.stats.deltaB; })},
         }},
        {"well",
         {
             {"V0", number_in([](RunConfig& c) -> double& { return c.well.V0; })},
             {"R", number_in([](RunConfig& c) -> double& { return c.well.R; })},
         }},
        {"run",
         {
             {"mode",
              [](RunConfig& c, const std::string&, const Value& v) {
                  c.mode = parse_flux_mode(v.text);
              }},
             {"temperature", number(&RunConfig::temperatureK)},
             {"greenhouse",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.greenhouse = to_bool(f, v);
              }},
             {"debyeWaller",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.debyeWaller = to_bool(f, v);
              }},
             {"phaseRegion",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.phaseRegion = to_bool(f, v);
              }},
             {"mGrid",
              [](RunConfig& c, const std::string&, const Value& v) {
                  c.mGrid = parse_m_grid(v.text);
              }},
             {"seed",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  const auto s = to_integer(f, v);
                  if (s < 0)
                      throw ValidationError(f, "must be >= 0");
                  c.seed = static_cast<std::uint64_t>(s);
              }},
             {"threads",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.threads = static_cast<int>(to_integer(f, v));
              }},
             {"points",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.points = static_cast<int>(to_integer(f, v));
              }},
             {"phases",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.phases = static_cast<int>(to_integer(f, v));
              }},
             {"replicas",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.replicas = to_integer(f, v);
              }},
             {"relTol", number(&RunConfig::relTol)},
             {"windAngle", number(&RunConfig::windAngleDeg)},
             {"siderealPhase", number(&RunConfig::siderealPhase)},
             {"out",
              [](RunConfig& c, const std::string&, const Value& v) { c.out = v.text; }},
             {"overlay",
              [](RunConfig& c, const std::string&, const Value& v) { c.overlay = v.text; }},
             {"emitPlotScript",
              [](RunConfig& c, const std::string& f, const Value& v) {
                  c.emitPlotScript = to_bool(f, v);
              }},
             {"json",
              [](RunConfig& c, const std::string& f, const Value& v) { c.json = to_bool(f, v); }},
         }},
    };
    return s;
}

Value parse_value(const std::string& raw, int line)
{
    Value v;
    v.line = line;
    if (!raw.empty() && raw.front() == '"') {
        const auto close = raw.find('"', 1);
        if (close == std::string::npos)
            throw ValidationError("line " + std::to_string(line), "unterminated string");
        if (!trim(raw.substr(close + 1)).empty())
            throw ValidationError("line " + std::to_string(line), "trailing text after string");
        v.text = raw.substr(1, close - 1);
        v.quoted = true;
    } else {
        v.text = raw;
    }
    return v;
}

std::string strip_comment(const std::string& line)
{
    bool inString = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"')
            inString = !inString;
        else if (line[i] == '#' && !inString)
            return line.substr(0, i);
    }
    return line;
}

} // namespace

MGrid parse_m_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');)
        parts.push_back(trim(p));
    if (parts.size() != 3)
        throw ValidationError("m-grid", "expected lo:hi:points");
    MGrid g;
    g.lo = to_number("m-grid.lo", {parts[0]});
    g.hi = to_number("m-grid.hi", {parts[1]});
    g.points = static_cast<int>(to_integer("m-grid.points", {parts[2]}));
    if (!(g.lo > 0.0) || !(g.hi >= g.lo))
        throw ValidationError("m-grid", "need 0 < lo <= hi");
    if (g.points < 1)
        throw ValidationError("m-grid.points", "must be >= 1");
    return g;
}

void RunConfig::validate() const
{
    scenario.validate();
    experiment.validate();
    site.validate();
    atmosphere.validate();
    RunPlan p = plan;
    p.experiment = experiment;
    p.validate();
    if (threads < 1)
        throw ValidationError("run.threads", "must be >= 1");
    if (points < 3)
        throw ValidationError("run.points", "must be >= 3");
    if (phases < 1)
        throw ValidationError("run.phases", "must be >= 1");
    if (replicas < 2)
        throw ValidationError("run.replicas", "must be >= 2");
    if (!(relTol > 0.0 && relTol < 0.5))
        throw ValidationError("run.relTol", "must lie in (0, 0.5)");
    if (!(temperatureK > 0.0))
        throw ValidationError("run.temperature", "must be > 0");
    if (!(siderealPhase >= 0.0 && siderealPhase < 1.0))
        throw ValidationError("run.siderealPhase", "must lie in [0, 1)");
}

RunConfig parse_config_text(const std::string& text, RunConfig base)
{
    const auto& sch = schema();
    std::string section;
    std::vector<std::tuple<std::string, std::string, Value>> entries;
    std::istringstream in(text);
    int lineNo = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineNo;
        const std::string s = trim(strip_comment(line));
        if (s.empty())
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ValidationError("line " + std::to_string(lineNo), "malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!sch.contains(section))
                throw ValidationError(section, "unknown section");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(lineNo), "expected key = value");
        if (section.empty())
            throw ValidationError("line " + std::to_string(lineNo), "key outside a section");
        const std::string key = trim(s.substr(0, eq));
        const std::string field = section + "." + key;
        if (!sch.at(section).contains(key))
            throw ValidationError(field, "unknown key");
        entries.emplace_back(section, key, parse_value(trim(s.substr(eq + 1)), lineNo));
    }
    // A registry name selects the row before any per-field override applies.
    std::stable_partition(entries.begin(), entries.end(), [](const auto& e) {
        return std::get<0>(e) == "experiment" && std::get<1>(e) == "name";
    });
    for (const auto& [sec, key, value] : entries)
        sch.at(sec).at(key)(base, sec + "." + key, value);
    base.plan.experiment = base.experiment;
    return base;
}

RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config", "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

Overlay read_overlay(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("overlay", "cannot open " + path.string());
    Overlay o;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        const double m = to_number("overlay.m", {trim(a)});
        const double alpha = to_number("overlay.alpha", {trim(b)});
        if (!(m > 0.0) || !(alpha > 0.0))
            throw ValidationError("overlay", "values must be > 0");
        if (!o.m.empty() && m <= o.m.back())
            throw ValidationError("overlay", "m must be strictly increasing");
        o.m.push_back(m);
        o.alpha.push_back(alpha);
    }
    if (o.m.size() < 2)
        throw ValidationError("overlay", "need at least two rows");
    return o;
}

} // namespace dmdecoh::cli
