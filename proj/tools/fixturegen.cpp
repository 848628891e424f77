// Regenerates the fixture trees and replay caches under a fixtures directory.
//
// Model replies come from a deterministic rule-based responder, not from a live
// model: the caches exercise every pipeline stage offline with known outcomes.

#include "icaa/cli.hpp"
#include "icaa/gateway.hpp"
#include "icaa/util.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Template {
    bool java = true;
    const char* names[2];
    const char* method;
    const char* description;
    const char* why;
    const char* fix;
    const char* text;
};

// {{CLS}} and {{PKG}} are substituted; the line carrying the marker is the defect.
const std::vector<Template> kTemplates = {
    {true, {"SettingsLoader", "ProfileReader"}, "load",
     "The settings file handle opened while loading properties is never closed.",
     "the FileInputStream is never closed, so every call leaks a file handle",
     "open the stream in a try-with-resources block", R"(package org.example.{{PKG}};

import java.io.FileInputStream;
import java.io.IOException;
import java.util.Properties;

/**
 * Loads key-value settings from a properties file on disk.
 */
public class {{CLS}} {
    private final String path;

    public {{CLS}}(String path) {
        this.path = path;
    }

    public Properties load() throws IOException {
        Properties props = new Properties();
        FileInputStream in = new FileInputStream(path); //@BUG
        props.load(in);
        return props;
    }

    public String get(String key) throws IOException {
        return load().getProperty(key, "");
    }
}
)"},
    {true, {"ModeSwitch", "AccessPolicy"}, "isStrict",
     "Strict mode is never detected when the mode string is read from configuration.",
     "strings are compared with == so equal values from different sources compare as different",
     "compare with \"strict\".equals(mode)", R"(package org.example.{{PKG}};

public class {{CLS}} {
    private final String mode;

    public {{CLS}}(String mode) {
        this.mode = mode;
    }

    public boolean isStrict() {
        return mode == "strict"; //@BUG
    }

    public String describe() {
        return isStrict() ? "strict mode" : "lenient mode";
    }
}
)"},
    {true, {"PriceTable", "InvoiceLine"}, "unitPrice",
     "Unit prices are off by tiny fractions after conversion to BigDecimal.",
     "new BigDecimal(double) keeps the binary approximation of the value",
     "use BigDecimal.valueOf(rawPrice)", R"(package org.example.{{PKG}};

import java.math.BigDecimal;
import java.math.RoundingMode;

public class {{CLS}} {
    private final double rawPrice;
    private final int quantity;

    public {{CLS}}(double rawPrice, int quantity) {
        this.rawPrice = rawPrice;
        this.quantity = quantity;
    }

    public BigDecimal unitPrice() {
        return new BigDecimal(rawPrice).setScale(2, RoundingMode.HALF_UP); //@BUG
    }

    public BigDecimal total() {
        return unitPrice().multiply(BigDecimal.valueOf(quantity));
    }
}
)"},
    {true, {"QueueHead", "FirstMatch"}, "first",
     "Reading the first element of an empty list crashes with NoSuchElementException.",
     "Iterator.next is called without checking hasNext",
     "check it.hasNext() and return null or throw a descriptive exception", R"(package org.example.{{PKG}};

import java.util.Iterator;
import java.util.List;

public class {{CLS}} {
    private final List<String> items;

    public {{CLS}}(List<String> items) {
        this.items = items;
    }

    public String first() {
        Iterator<String> it = items.iterator();
        return it.next(); //@BUG
    }

    public int size() {
        return items.size();
    }
}
)"},
    {true, {"NameFilter", "TagCleaner"}, "dropEmpty",
     "Removing empty names throws ConcurrentModificationException.",
     "the list is modified while a for-each loop iterates over it",
     "use names.removeIf(String::isEmpty)", R"(package org.example.{{PKG}};

import java.util.ArrayList;
import java.util.List;

public class {{CLS}} {
    private final List<String> names = new ArrayList<>();

    public void add(String name) {
        names.add(name);
    }

    public List<String> dropEmpty() {
        for (String name : names) {
            if (name.isEmpty()) {
                names.remove(name); //@BUG
            }
        }
        return names;
    }
}
)"},
    {true, {"DateStamp", "LogClock"}, "format",
     "Timestamps are garbled when several threads format dates at once.",
     "a shared SimpleDateFormat is used from pool threads but is not thread-safe",
     "use java.time.format.DateTimeFormatter or a ThreadLocal formatter", R"(package org.example.{{PKG}};

import java.text.SimpleDateFormat;
import java.util.Date;
import java.util.concurrent.ExecutorService;
import java.util.concurrent.Executors;

public class {{CLS}} {
    private static final SimpleDateFormat FORMAT = new SimpleDateFormat("yyyy-MM-dd HH:mm"); //@BUG
    private final ExecutorService pool = Executors.newFixedThreadPool(4);

    public static String format(Date date) {
        return FORMAT.format(date);
    }

    public void stampAll(Iterable<Date> dates) {
        for (Date d : dates) {
            pool.submit(() -> System.out.println(format(d)));
        }
    }
}
)"},
    {true, {"UserDirectory", "AccountIndex"}, "byEmail",
     "Looking up an unknown e-mail address crashes instead of reporting a missing user.",
     "Optional.get is called on a possibly empty result",
     "return the Optional or use orElseThrow with a descriptive exception", R"(package org.example.{{PKG}};

import java.util.List;

public class {{CLS}} {
    public static final class User {
        final String email;
        final String name;

        User(String email, String name) {
            this.email = email;
            this.name = name;
        }
    }

    private final List<User> users;

    public {{CLS}}(List<User> users) {
        this.users = users;
    }

    public User byEmail(String email) {
        return users.stream().filter(u -> u.email.equals(email)).findFirst().get(); //@BUG
    }
}
)"},
    {true, {"SlugMaker", "FileNamer"}, "slug",
     "Generated slugs still contain spaces.",
     "the result of String.replace is discarded because strings are immutable",
     "assign the result: name = name.replace(' ', '-')", R"(package org.example.{{PKG}};

import java.util.Locale;

public class {{CLS}} {
    public String slug(String title) {
        String name = title.trim().toLowerCase(Locale.ROOT);
        name.replace(' ', '-'); //@BUG
        return name;
    }

    public String withExtension(String title, String ext) {
        return slug(title) + "." + ext;
    }
}
)"},
    {false, {"weather", "status_probe"}, "fetch",
     "The client hangs forever when the remote service stops answering.",
     "requests.get is called without a timeout",
     "pass timeout=10 to requests.get", R"(import requests

BASE_URL = "https://api.example.org"


def fetch(path):
    resp = requests.get(BASE_URL + path)  #@BUG
    resp.raise_for_status()
    return resp.json()


def current(city):
    return fetch("/current?city=" + city)["temperature"]
)"},
    {false, {"settings", "pipeline_conf"}, "read_config",
     "Loading an untrusted configuration file can construct arbitrary Python objects.",
     "yaml.load is called without a safe Loader",
     "use yaml.safe_load(fh)", R"(import yaml


def read_config(path):
    with open(path) as fh:
        data = yaml.load(fh)  #@BUG
    return data or {}


def option(path, key, default=None):
    return read_config(path).get(key, default)
)"},
    {false, {"wordcount", "line_stats"}, "count_words",
     "Counting words over many files runs out of file descriptors.",
     "the file opened with open() is never closed",
     "use a with statement", R"(def count_words(path):
    fh = open(path)  #@BUG
    words = 0
    for line in fh:
        words += len(line.split())
    return words


def report(paths):
    return {p: count_words(p) for p in paths}
)"},
    {false, {"backup", "archiver"}, "archive",
     "Directory names containing shell metacharacters run arbitrary commands.",
     "subprocess.call runs a concatenated command string with shell=True",
     "pass an argument list without shell=True", R"(import subprocess


def archive(user_dir, target):
    cmd = "tar czf " + target + " " + user_dir
    return subprocess.call(cmd, shell=True)  #@BUG


def archive_all(dirs, target_dir):
    return [archive(d, target_dir + "/" + d + ".tgz") for d in dirs]
)"},
    {false, {"accounts", "auth_store"}, "hash_password",
     "Stored password hashes can be brute-forced quickly.",
     "hashlib.md5 is a fast digest and unsuitable for password storage",
     "use hashlib.scrypt or a dedicated password hashing library", R"(import hashlib
import os


def hash_password(password):
    salt = os.urandom(16).hex()
    digest = hashlib.md5((salt + password).encode()).hexdigest()  #@BUG
    return salt + "$" + digest


def verify(stored, password):
    salt, digest = stored.split("$", 1)
    return hashlib.md5((salt + password).encode()).hexdigest() == digest
)"},
    {false, {"sanitize", "redactor"}, "scrub",
     "Upper-case tokens are not redacted from log lines.",
     "re.IGNORECASE is passed as the positional count argument of re.sub",
     "pass flags=re.IGNORECASE", R"(import re

SECRET = re.compile(r"password=\S+")


def scrub(text):
    return re.sub(r"token=\S+", "token=***", text, re.IGNORECASE)  #@BUG


def scrub_all(lines):
    return [SECRET.sub("password=***", scrub(line)) for line in lines]
)"},
    {false, {"workers", "poller"}, "start",
     "The poller blocks the caller instead of running in the background.",
     "poll(queue) is called immediately and its result is passed as the thread target",
     "pass target=poll, args=(queue,)", R"(import threading


def poll(queue):
    while queue:
        queue.pop()


def start(queue):
    t = threading.Thread(target=poll(queue))  #@BUG
    t.start()
    return t
)"},
};

enum class Behavior { Detect, DetectPlusExtra, DetectTwice, Silent, WrongLine, OutOfRange, UnknownIdentifier };

Behavior behavior_of(int n) {
    switch (n) {
        case 2: case 8: return Behavior::DetectPlusExtra;
        case 5: return Behavior::DetectTwice;
        case 3: case 9: case 17: return Behavior::Silent;
        case 6: case 14: case 21: return Behavior::WrongLine;
        case 11: case 19: return Behavior::OutOfRange;
        case 23: return Behavior::UnknownIdentifier;
        default: return Behavior::Detect;
    }
}

struct CaseSpec {
    std::string id;
    std::string path;  // relative to the case root
    int line = 1;
    const Template* tmpl = nullptr;
    Behavior behavior = Behavior::Detect;
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
    return s;
}

std::string two_digits(int n) { return (n < 10 ? "0" : "") + std::to_string(n); }

std::vector<CaseSpec> write_t2(const fs::path& dir) {
    fs::remove_all(dir / "cases");
    std::vector<CaseSpec> specs;
    std::string manifest;
    for (int n = 1; n <= 23; ++n) {
        const auto& t = kTemplates[static_cast<std::size_t>((n - 1) % kTemplates.size())];
        const std::string name = t.names[(n - 1) / static_cast<int>(kTemplates.size())];
        const auto pkg = "c" + two_digits(n);
        CaseSpec spec;
        spec.id = "t2-" + two_digits(n);
        spec.tmpl = &t;
        spec.behavior = behavior_of(n);
        spec.path = t.java ? "src/main/java/org/example/" + pkg + "/" + name + ".java" : "src/" + pkg + "/" + name + ".py";
        auto text = replace_all(replace_all(t.text, "{{CLS}}", name), "{{PKG}}", pkg);
        const auto lines = icaa::split_lines(text);
        std::string clean;
        for (std::size_t i = 0; i + 1 < lines.size() || (i < lines.size() && !lines[i].empty()); ++i) {
            auto l = lines[i];
            for (const char* marker : {" //@BUG", "  #@BUG"}) {
                const auto at = l.find(marker);
                if (at != std::string::npos) {
                    l.erase(at);
                    spec.line = static_cast<int>(i) + 1;
                }
            }
            clean += l + "\n";
        }
        icaa::write_file(dir / "cases" / spec.id / spec.path, clean);

        ordered_json row;
        row["case_id"] = spec.id;
        row["suite"] = "t2";
        row["language"] = t.java ? "java" : "python";
        row["project_root"] = "cases/" + spec.id;
        row["description"] = t.description;
        row["query"] = std::string("Find API misuse bugs in this project. Issue report: ") + t.description;
        row["ground_truth"] = ordered_json::array(
            {{{"file", spec.path}, {"line_span", {spec.line, spec.line}}, {"kind", "api-misuse"}}});
        manifest += row.dump() + "\n";
        specs.push_back(std::move(spec));
    }
    icaa::write_file(dir / "manifest.jsonl", manifest);
    return specs;
}

std::string last_user(const icaa::llm::ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == icaa::llm::Role::User) return it->content;
    }
    return {};
}

std::string line_value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    std::string found;
    while (std::getline(in, line)) {
        if (icaa::starts_with(line, key)) found = icaa::trim_copy(line.substr(key.size()));
    }
    return found;
}

std::size_t count_line_starts(const std::string& text, const std::string& key) {
    std::size_t n = 0;
    for (auto pos = text.find("\n" + key); pos != std::string::npos; pos = text.find("\n" + key, pos + 1)) ++n;
    return n;
}

std::string between(const std::string& text, const std::string& open, const std::string& close) {
    const auto a = text.find(open);
    if (a == std::string::npos) return {};
    const auto b = text.find(close, a + open.size());
    return text.substr(a + open.size(), b == std::string::npos ? std::string::npos : b - a - open.size());
}

// Anchor token at the start of the first line of `code` containing `needle`.
std::string anchor_of(const std::string& code, const std::string& needle) {
    for (const auto& line : icaa::split_lines(code)) {
        if (line.find(needle) != std::string::npos) return line.substr(0, line.find(' '));
    }
    return {};
}

ordered_json finding(const CaseSpec& c, int line, const std::string& kind, const std::string& explanation) {
    return {{"file", c.path},
            {"line", "⟦L" + std::to_string(line) + "⟧"},
            {"kind", kind},
            {"summary", c.tmpl->description},
            {"explanation", explanation},
            {"suggested_fix", c.tmpl->fix}};
}

std::string react_final(const CaseSpec& c) {
    const auto main = finding(c, c.line, "api-misuse",
                              std::string("In `") + c.tmpl->method + "` " + c.tmpl->why + ".");
    ordered_json doc;
    doc["findings"] = ordered_json::array();
    switch (c.behavior) {
        case Behavior::Detect: doc["findings"].push_back(main); break;
        case Behavior::DetectPlusExtra:
            doc["findings"].push_back(main);
            doc["findings"].push_back(
                finding(c, 1, "style", "The first declaration of the file does not document its purpose."));
            break;
        case Behavior::DetectTwice:
            doc["findings"].push_back(main);
            doc["findings"].push_back(main);
            break;
        case Behavior::Silent: break;
        case Behavior::WrongLine:
            doc["findings"].push_back(finding(c, 1, "api-misuse", "The imports suggest an unchecked API is in use."));
            break;
        case Behavior::OutOfRange:
            doc["findings"].push_back(finding(c, 9999, "api-misuse", "The call at the end of the file misuses the API."));
            break;
        case Behavior::UnknownIdentifier:
            doc["findings"].push_back(
                finding(c, 1, "api-misuse", "Resources are released through `closeQuietlyAll`, which swallows errors."));
            break;
    }
    return doc.dump();
}

// Rule-based stand-in for a chat model. Every reply is a pure function of the request.
class Responder {
public:
    explicit Responder(std::vector<CaseSpec> cases) : cases_(std::move(cases)) {}

    std::string operator()(const icaa::llm::ChatRequest& request) const {
        const auto prompt = last_user(request);
        if (prompt.find("devise a basic work plan") != std::string::npos) return plan(prompt);
        if (prompt.find("Work in steps.") != std::string::npos) return step(prompt);
        if (prompt.find("Choose the next action:") != std::string::npos) return decision(prompt);
        if (prompt.find("Output format:\n{") != std::string::npos) return check(prompt);
        if (icaa::starts_with(prompt, "Find bugs in the code below from ")) return baseline(prompt);
        return "I cannot help with that request.";
    }

private:
    const CaseSpec* by_path(const std::string& path) const {
        for (const auto& c : cases_) {
            if (c.path == path) return &c;
        }
        return nullptr;
    }

    std::string plan(const std::string& prompt) const {
        const auto files = between(prompt, "\nFiles:\n", "\n\n");
        const auto first = icaa::split_lines(files).empty() ? std::string() : icaa::split_lines(files).front();
        return "Summary: Look for misuse of library APIs reported in the issue.\nBug kinds: api-misuse, "
               "resource-leak\nScope: " +
               first;
    }

    std::string step(const std::string& prompt) const {
        const auto path = line_value(prompt, "Scope: ");
        const auto* c = by_path(path);
        const auto observed = count_line_starts(prompt, "Observation:");
        if (observed == 0) {
            return "Thought: I should look at the definitions and lint findings of the file first.\nAction: "
                   "static_analysis\nAction Input: " +
                   path;
        }
        if (observed == 1) {
            return "Thought: Now I need the code itself with line anchors.\nAction: split\nAction Input: " + path;
        }
        if (c == nullptr) return "Thought: Nothing suspicious was found.\nFinal Answer: {\"findings\": []}";
        return "Thought: I have enough evidence to report my findings.\nFinal Answer: " + react_final(*c);
    }

    static std::string decision(const std::string& prompt) {
        const bool fresh = prompt.find("Actions taken: none") != std::string::npos;
        const bool java = prompt.find(".java (lines ") != std::string::npos;
        return fresh && java ? "USAGE" : "STOP";
    }

    static std::string check(const std::string& prompt) {
        const auto context = between(prompt, "\nContext:\n", "\nCode:\n");
        const auto code = between(prompt, "\nCode:\n", "\n```\n\nComment:");
        if (code.find("onOptionsItemSelected(") != std::string::npos &&
            context.find("Future<?> clearDownloadLog()") != std::string::npos) {
            const auto anchor = anchor_of(code, "clear_history_item");
            ordered_json v;
            v["is_inconsistent"] = true;
            v["explanations_and_suggestion"] =
                "The comment says the handler clears the download log, but the case at " + anchor +
                " handles R.id.clear_history_item and calls `clearHistory`, which deletes the playback history. "
                "DBWriter provides `clearDownloadLog` for what the comment describes, so the handler should call "
                "it instead.";
            v["fixed_comment"] = "Handles the toolbar menu. Selecting the clear history item removes the playback "
                                 "history and reloads the list.";
            v["fixed_code"] = "case R.id.clear_logs_item:\n    DBWriter.clearDownloadLog();\n    loadDownloadLog();\n"
                              "    return true;";
            return "```json\n" + v.dump(2) + "\n```";
        }
        if (code.find("def separable_blur(") != std::string::npos) {
            const auto anchor = anchor_of(code, "gaussian_kernel_1d(kernel_size");
            return "{\n  \"is_inconsistent\": true,\n  \"explanations_and_suggestion\": \"The docstring requires an "
                   "odd kernel size, but `separable_blur` passes kernel_size to `gaussian_kernel_1d` at " +
                   anchor +
                   " without checking it. Raise a ValueError for even sizes.\",\n  \"fixed_comment\": \"Blurs a "
                   "grayscale image with a separable gaussian filter. Even kernel sizes shift the image by half a "
                   "pixel.\",\n  \"fixed_code\": \"if kernel_size % 2 == 0:\\n    raise ValueError('kernel_size "
                   "must be odd')\",\n}";
        }
        return "{\"is_inconsistent\": false, \"explanations_and_suggestion\": \"The code does what the comment "
               "describes.\", \"fixed_comment\": \"\", \"fixed_code\": \"\"}";
    }

    std::string baseline(const std::string& prompt) const {
        const auto head = prompt.substr(0, prompt.find('\n'));
        auto path = head.substr(std::string("Find bugs in the code below from ").size());
        path = path.substr(0, path.find(". Every line"));
        const auto* c = by_path(path);
        ordered_json doc;
        doc["findings"] = ordered_json::array();
        if (c == nullptr) return doc.dump();
        doc["findings"].push_back(finding(*c, 1, "api-misuse", "The imported API is easy to misuse."));
        const auto n = std::stoi(c->id.substr(3));
        if (n % 2 == 0) {
            doc["findings"].push_back(finding(*c, c->line, "api-misuse",
                                              std::string("In `") + c->tmpl->method + "` " + c->tmpl->why + "."));
        }
        return doc.dump();
    }

    std::vector<CaseSpec> cases_;
};

void write_taxonomy(const fs::path& dir) {
    const std::vector<std::tuple<const char*, const char*, int>> groups = {
        {"consistent", "FalseNegative", 2},     {"consistent", "TruePositive", 218},
        {"unknown", "Ambiguous", 34},           {"inconsistent", "FalsePositive", 147},
        {"inconsistent", "TrueNegative", 31},   {"inconsistent", "Indeterminate", 8}};
    std::string out;
    int n = 0;
    for (const auto& [response, interpretation, count] : groups) {
        for (int i = 0; i < count; ++i) {
            ordered_json row;
            row["pair"] = "pair-" + std::to_string(++n);
            row["response"] = response;
            row["interpretation"] = interpretation;
            out += row.dump() + "\n";
        }
    }
    icaa::write_file(dir / "labels.jsonl", out);
}

void write_t1_sample(const fs::path& dir) {
    fs::remove_all(dir);
    struct Sample {
        const char* id;
        const char* language;
        const char* file;
        int start;
        int end;
        const char* category;
        const char* description;
        const char* before;
        const char* after;
    };
    const std::vector<Sample> samples = {
        {"perf-001", "java", "src/Report.java", 6, 8, "performance",
         "String concatenation inside a loop creates a new string on every iteration.",
         "public class Report {\n    public String join(String[] parts) {\n        String out = \"\";\n"
         "        int i = 0;\n        while (i < parts.length) {\n            out = out + parts[i];\n"
         "            out = out + \",\";\n            i++;\n        }\n        return out;\n    }\n}\n",
         "public class Report {\n    public String join(String[] parts) {\n        return String.join(\",\", parts);\n"
         "    }\n}\n"},
        {"perf-002", "python", "src/lookup.py", 3, 4, "performance",
         "Membership tests against a list make the lookup quadratic.",
         "def common(a, b):\n    out = []\n    for x in a:\n        if x in b:\n            out.append(x)\n"
         "    return out\n",
         "def common(a, b):\n    bs = set(b)\n    return [x for x in a if x in bs]\n"},
    };
    for (const auto& s : samples) {
        const auto root = dir / s.id;
        ordered_json meta;
        meta["language"] = s.language;
        meta["file"] = s.file;
        meta["start_line"] = s.start;
        meta["end_line"] = s.end;
        meta["category"] = s.category;
        icaa::write_file(root / "metadata.json", meta.dump(2) + "\n");
        icaa::write_file(root / "description.txt", std::string(s.description) + "\n");
        icaa::write_file(root / "before" / s.file, s.before);
        icaa::write_file(root / "after" / s.file, s.after);
    }
}

int run_cli(const std::vector<std::string>& args, const std::shared_ptr<icaa::llm::ChatBackend>& backend) {
    icaa::cli::Environment env;
    env.getenv = [](const char*) -> const char* { return nullptr; };
    env.backend = backend;
    std::vector<std::string> full = {"icaa"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream sink;
    const int code = icaa::cli::run(full, sink, std::cerr, env);
    if (code != 0) throw icaa::Error("icaa exited with " + std::to_string(code));
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: icaa-fixturegen <fixtures-dir>\n";
        return 1;
    }
    try {
        const fs::path fx = fs::absolute(argv[1]);
        for (const auto* required : {"antennapod/src", "blur/src"}) {
            if (!fs::is_directory(fx / required)) throw icaa::Error("missing hand-written tree " + (fx / required).string());
        }
        const auto cases = write_t2(fx / "t2");
        write_taxonomy(fx / "taxonomy");
        write_t1_sample(fx / "t1_import");
        auto backend = std::make_shared<icaa::llm::ScriptedBackend>(icaa::llm::ScriptedBackend::Responder(Responder(cases)));
        const auto scratch = fs::temp_directory_path() / "icaa-fixturegen";
        fs::create_directories(scratch);

        for (const auto* project : {"antennapod", "blur"}) {
            const auto dir = fx / project;
            fs::remove_all(dir / "cache");
            run_cli({"ingest", (dir / "src").string(), "--out", (dir / "corpus.jsonl").string()}, backend);
            for (const auto* context : {"on", "off"}) {
                run_cli({"--mode", "record", "--cache", (dir / "cache").string(), "check", "--corpus",
                         (dir / "corpus.jsonl").string(), "--root", (dir / "src").string(), "--context", context,
                         "--out", (scratch / "verdicts.jsonl").string()},
                        backend);
            }
        }

        fs::remove_all(fx / "t2" / "cache");
        for (const auto* agent : {"react", "baseline"}) {
            run_cli({"--mode", "record", "--cache", (fx / "t2" / "cache").string(), "bench", "--suite", "t2",
                     "--manifest", (fx / "t2" / "manifest.jsonl").string(), "--agent", agent, "--out",
                     (scratch / "eval.json").string()},
                    backend);
        }
        fs::remove_all(scratch);
        std::cerr << "fixtures written to " << fx.string() << " (" << backend->calls() << " scripted replies)\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
