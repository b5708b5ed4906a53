#include "ddehopf/cli.hpp"

#include "ddehopf/equilibria.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace ddehopf::cli {

namespace {

std::string_view trim(std::string_view s) noexcept
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_name(std::string_view s) noexcept
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            return false;
    return true;
}

[[noreturn]] void config_error(std::string const& origin, int line, std::string const& msg)
{
    throw Error(ErrorKind::InvalidConfig, origin + ":" + std::to_string(line) + ": " + msg);
}

using Section = std::map<std::string, IniValue>;

Section const* find_section(IniFile const& ini, std::string const& name)
{
    auto const it = ini.find(name);
    return it == ini.end() ? nullptr : &it->second;
}

void require_known_keys(Section const& s, std::string const& section, std::set<std::string> const& known,
                        std::string const& origin)
{
    for (auto const& [key, v] : s)
        if (!known.contains(key))
            config_error(origin, v.line, "unknown key '" + key + "' in [" + section + "]");
}

// rethrows expression errors with the file position of the entry
Expr parse_entry(IniValue const& v, std::string const& key, ConstantTable const& constants, std::string const& origin)
{
    try
    {
        return parse(v.text, constants);
    }
    catch (Error const& e)
    {
        throw Error(e.kind(), origin + ":" + std::to_string(v.line) + ": in '" + key + "': " + e.what(), e.pos());
    }
}

double number_entry(IniValue const& v, std::string const& key, std::string const& origin)
{
    try
    {
        return parse_number(v.text, key);
    }
    catch (Error const& e)
    {
        config_error(origin, v.line, e.what());
    }
}

int int_entry(IniValue const& v, std::string const& key, std::string const& origin)
{
    double const d = number_entry(v, key, origin);
    if (d != std::floor(d) || std::abs(d) > 1e9)
        config_error(origin, v.line, "'" + key + "' must be an integer");
    return static_cast<int>(d);
}

bool bool_entry(IniValue const& v, std::string const& key, std::string const& origin)
{
    if (v.text == "true" || v.text == "yes" || v.text == "1")
        return true;
    if (v.text == "false" || v.text == "no" || v.text == "0")
        return false;
    config_error(origin, v.line, "'" + key + "' must be true or false");
}

template <class F>
auto wrap(IniValue const& v, std::string const& origin, F&& f)
{
    try
    {
        return f(v.text);
    }
    catch (Error const& e)
    {
        config_error(origin, v.line, e.what());
    }
}

} // namespace

int exit_code_for(ErrorKind kind) noexcept
{
    switch (kind)
    {
    case ErrorKind::Syntax:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::InvalidModel:
    case ErrorKind::InvalidConfig:
    case ErrorKind::Io:
    case ErrorKind::PreconditionFailed: return kUsage;
    case ErrorKind::DegenerateBeyondScope:
    case ErrorKind::NonDegeneracyViolated: return kOutOfScope;
    case ErrorKind::BlowUp: return kBlowUp;
    default: return kNumerical;
    }
}

IniFile parse_ini(std::string_view text, std::string const& origin)
{
    IniFile ini;
    std::string section;
    int line_no = 0;
    while (!text.empty())
    {
        auto const nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                config_error(origin, line_no, "unterminated section header");
            auto const name = trim(line.substr(1, line.size() - 2));
            if (!is_name(name))
                config_error(origin, line_no, "invalid section name '" + std::string{name} + "'");
            section = std::string{name};
            ini[section];
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            config_error(origin, line_no, "expected 'key = value'");
        auto const key = trim(line.substr(0, eq));
        auto const value = trim(line.substr(eq + 1));
        if (!is_name(key))
            config_error(origin, line_no, "invalid key '" + std::string{key} + "'");
        auto [it, inserted] = ini[section].emplace(std::string{key}, IniValue{std::string{value}, line_no});
        if (!inserted)
            config_error(origin, line_no,
                         "duplicate key '" + std::string{key} + "' (first at line " + std::to_string(it->second.line)
                             + ")");
    }
    return ini;
}

IniFile read_ini(std::string const& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ini(ss.str(), path);
}

ModelSpec model_from_ini(IniFile const& ini, std::string const& origin)
{
    auto const* model = find_section(ini, "model");
    if (!model)
        throw Error(ErrorKind::InvalidModel, origin + ": missing [model] section");
    require_known_keys(*model, "model",
                       {"name", "rhs", "tau", "equilibrium", "equilibrium.residual", "equilibrium.lower",
                        "equilibrium.upper"},
                       origin);

    ConstantTable constants;
    if (auto const* cs = find_section(ini, "constants"))
        for (auto const& [key, v] : *cs)
        {
            Expr const e = parse_entry(v, key, {}, origin);
            if (e.depends_on(Var::X) || e.depends_on(Var::Xd) || e.depends_on(Var::Lam) || e.depends_on(Var::Mu))
                config_error(origin, v.line, "constant '" + key + "' must not use model variables");
            constants.emplace(key, eval_real(e, Point{}));
        }

    auto get = [&](std::string const& key) -> IniValue const* {
        auto const it = model->find(key);
        return it == model->end() ? nullptr : &it->second;
    };

    std::string name = std::filesystem::path{origin}.stem().string();
    if (auto const* v = get("name"))
        name = v->text;
    auto const* rhs = get("rhs");
    if (!rhs)
        throw Error(ErrorKind::InvalidModel, origin + ": [model] needs 'rhs'");
    auto const* tau = get("tau");
    if (!tau)
        throw Error(ErrorKind::InvalidModel, origin + ": [model] needs 'tau'");

    EquilibriumDef eq;
    auto const* explicit_eq = get("equilibrium");
    auto const* residual = get("equilibrium.residual");
    auto const* lower = get("equilibrium.lower");
    auto const* upper = get("equilibrium.upper");
    if (explicit_eq && (residual || lower || upper))
        throw Error(ErrorKind::InvalidModel, origin + ": give either 'equilibrium' or the implicit triple, not both");
    if (explicit_eq)
        eq = ExplicitEquilibrium{parse_entry(*explicit_eq, "equilibrium", constants, origin)};
    else if (residual && lower && upper)
        eq = ImplicitEquilibrium{parse_entry(*residual, "equilibrium.residual", constants, origin),
                                 parse_entry(*lower, "equilibrium.lower", constants, origin),
                                 parse_entry(*upper, "equilibrium.upper", constants, origin)};
    else
        throw Error(ErrorKind::InvalidModel, origin
                                                 + ": [model] needs 'equilibrium', or 'equilibrium.residual', "
                                                   "'equilibrium.lower' and 'equilibrium.upper'");

    return ModelSpec{name, parse_entry(*rhs, "rhs", constants, origin), number_entry(*tau, "tau", origin),
                     std::move(eq)};
}

ModelSpec resolve_model(std::string const& name_or_path)
{
    if (name_or_path == "sis-inverse" || name_or_path == "sis-exp")
        return builtin_model(name_or_path);
    if (!std::filesystem::exists(name_or_path))
        throw Error(ErrorKind::InvalidConfig,
                    "'" + name_or_path + "' is neither a built-in model (sis-inverse, sis-exp) nor a file");
    return model_from_ini(read_ini(name_or_path), name_or_path);
}

double parse_number(std::string_view text, std::string_view what)
{
    auto const t = trim(text);
    double v = 0.0;
    auto const* first = t.data();
    auto const* last = t.data() + t.size();
    if (!t.empty() && *first == '+')
        ++first;
    auto const [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw Error(ErrorKind::InvalidConfig,
                    "invalid number '" + std::string{t} + "' for " + std::string{what});
    return v;
}

Range parse_range(std::string_view text, bool with_step)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true)
    {
        auto const colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos)
            break;
        start = colon + 1;
    }
    std::size_t const want = with_step ? 3 : 2;
    if (parts.size() != want)
        throw Error(ErrorKind::InvalidConfig, "range '" + std::string{text} + "' must have the form "
                                                  + (with_step ? "lo:hi:step" : "lo:hi"));
    Range r;
    r.lo = parse_number(parts[0], "range start");
    r.hi = parse_number(parts[1], "range end");
    if (!(r.lo < r.hi))
        throw Error(ErrorKind::InvalidConfig, "range '" + std::string{text} + "' is empty");
    if (with_step)
    {
        r.step = parse_number(parts[2], "range step");
        if (!(*r.step > 0.0))
            throw Error(ErrorKind::InvalidConfig, "range step must be positive");
    }
    return r;
}

std::array<double, 2> parse_pair(std::string_view text)
{
    auto const comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
        throw Error(ErrorKind::InvalidConfig, "expected 'lam,mu' but got '" + std::string{text} + "'");
    return {parse_number(text.substr(0, comma), "lam"), parse_number(text.substr(comma + 1), "mu")};
}

ModelSpec RunConfig::model_spec() const
{
    if (model && inline_model)
        throw Error(ErrorKind::InvalidConfig, "two model sources: --model/[run] model and a [model] section");
    if (!model && !inline_model)
        throw Error(ErrorKind::InvalidConfig, "no model given (use --model or a [model] section)");
    ModelSpec m = model ? resolve_model(*model) : *inline_model;
    return tau ? m.with_tau(*tau) : m;
}

void load_config(std::string const& path, RunConfig& cfg, std::string_view command)
{
    IniFile const ini = read_ini(path);

    static std::map<std::string, std::set<std::string>> const known = {
        {"run", {"model", "tau", "out", "workers", "no_header"}},
        {"model", {}},
        {"constants", {}},
        {"sim",
         {"step", "transient", "record", "perturbation", "history", "threshold", "settle_max", "settle_ratio"}},
        {"analyze", {"guess", "scan_lam", "scan_mu", "scan_points"}},
        {"hopf-curve", {"omega_range", "points"}},
        {"sweep", {"mu", "lam_range"}},
        {"simulate", {"lam", "mu"}},
        {"verify", {"tol"}},
    };
    for (auto const& [name, section] : ini)
    {
        auto const it = known.find(name);
        if (it == known.end())
        {
            int const line = section.empty() ? 0 : section.begin()->second.line;
            config_error(path, line, name.empty() ? "entries before the first section" : "unknown section [" + name + "]");
        }
        if (name != "model" && name != "constants")
            require_known_keys(section, name, it->second, path);
    }

    auto apply = [&](std::string const& section, std::string const& key, auto&& fn) {
        auto const* s = find_section(ini, section);
        if (!s)
            return;
        auto const it = s->find(key);
        if (it != s->end())
            fn(it->second);
    };
    bool const active_analyze = command == "analyze";
    bool const active_curve = command == "hopf-curve";
    bool const active_sweep = command == "sweep";
    bool const active_simulate = command == "simulate";
    bool const active_verify = command == "verify";

    apply("run", "model", [&](IniValue const& v) { cfg.model = v.text; });
    apply("run", "tau", [&](IniValue const& v) { cfg.tau = number_entry(v, "tau", path); });
    apply("run", "out", [&](IniValue const& v) { cfg.out = v.text; });
    apply("run", "workers", [&](IniValue const& v) { cfg.workers = int_entry(v, "workers", path); });
    apply("run", "no_header", [&](IniValue const& v) { cfg.no_header = bool_entry(v, "no_header", path); });
    if (find_section(ini, "model"))
        cfg.inline_model = model_from_ini(ini, path);

    apply("sim", "step", [&](IniValue const& v) { cfg.sim.step = number_entry(v, "step", path); });
    apply("sim", "transient", [&](IniValue const& v) { cfg.sim.t_transient = number_entry(v, "transient", path); });
    apply("sim", "record", [&](IniValue const& v) { cfg.sim.t_record = number_entry(v, "record", path); });
    apply("sim", "perturbation",
          [&](IniValue const& v) { cfg.sim.history = EquilibriumHistory{number_entry(v, "perturbation", path)}; });
    apply("sim", "history", [&](IniValue const& v) {
        if (v.text != "equilibrium")
            cfg.sim.history = ConstantHistory{number_entry(v, "history", path)};
    });
    apply("sim", "threshold",
          [&](IniValue const& v) { cfg.sim.amplitude_threshold = number_entry(v, "threshold", path); });
    apply("sim", "settle_max", [&](IniValue const& v) { cfg.sim.settle_max = number_entry(v, "settle_max", path); });
    apply("sim", "settle_ratio",
          [&](IniValue const& v) { cfg.sim.settle_ratio = number_entry(v, "settle_ratio", path); });

    if (active_analyze)
    {
        apply("analyze", "guess", [&](IniValue const& v) { cfg.guess = wrap(v, path, parse_pair); });
        apply("analyze", "scan_lam",
              [&](IniValue const& v) { cfg.scan_lam = wrap(v, path, [](auto t) { return parse_range(t, false); }); });
        apply("analyze", "scan_mu",
              [&](IniValue const& v) { cfg.scan_mu = wrap(v, path, [](auto t) { return parse_range(t, false); }); });
        apply("analyze", "scan_points",
              [&](IniValue const& v) { cfg.scan_points = int_entry(v, "scan_points", path); });
    }
    if (active_curve)
    {
        apply("hopf-curve", "omega_range", [&](IniValue const& v) {
            cfg.omega_range = wrap(v, path, [](auto t) { return parse_range(t, false); });
        });
        apply("hopf-curve", "points", [&](IniValue const& v) { cfg.points = int_entry(v, "points", path); });
    }
    if (active_sweep)
    {
        apply("sweep", "mu", [&](IniValue const& v) { cfg.mu = number_entry(v, "mu", path); });
        apply("sweep", "lam_range",
              [&](IniValue const& v) { cfg.lam_range = wrap(v, path, [](auto t) { return parse_range(t, true); }); });
    }
    if (active_simulate)
    {
        apply("simulate", "lam", [&](IniValue const& v) { cfg.lam = number_entry(v, "lam", path); });
        apply("simulate", "mu", [&](IniValue const& v) { cfg.mu = number_entry(v, "mu", path); });
    }
    if (active_verify)
        apply("verify", "tol", [&](IniValue const& v) { cfg.tolerance = number_entry(v, "tol", path); });
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto const [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string{"nan"};
}

} // namespace ddehopf::cli
