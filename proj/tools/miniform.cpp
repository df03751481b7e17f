#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "miniform/session.hpp"

namespace {

// mirrors everything written to the primary buffer into a log file
class TeeBuf : public std::streambuf {
public:
    TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

protected:
    int overflow(int c) override {
        if (c == EOF)
            return !EOF;
        int r1 = a_->sputc(static_cast<char>(c));
        int r2 = b_->sputc(static_cast<char>(c));
        return r1 == EOF || r2 == EOF ? EOF : c;
    }
    int sync() override {
        int r1 = a_->pubsync();
        int r2 = b_->pubsync();
        return r1 == 0 && r2 == 0 ? 0 : -1;
    }

private:
    std::streambuf* a_;
    std::streambuf* b_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"miniform - batch symbolic manipulation kernel"};

    std::string program;
    std::string setupFile;
    bool logMirror = false;
    std::vector<std::string> defines;
    std::vector<std::string> includeDirs;
    std::vector<std::string> overrides;

    app.add_option("program", program, "program file (.frm)")->required();
    app.add_option("--setup", setupFile, "setup file with <key> <value> lines");
    app.add_flag("--log", logMirror, "mirror regular output to <program>.log");
    app.add_option("-D,--define", defines, "predefine a preprocessor variable (name=value)");
    app.add_option("-I,--include", includeDirs, "add a directory to the include path");
    app.add_option("--set", overrides, "override one setup key (key=value)");

    CLI11_PARSE(app, argc, argv);

    miniform::RunConfig cfg;
    try {
        if (!setupFile.empty())
            cfg.loadSetupFile(setupFile);
        for (const std::string& s : overrides) {
            size_t eq = s.find('=');
            if (eq == std::string::npos) {
                std::cerr << "miniform: --set needs key=value\n";
                return 2;
            }
            cfg.applySetupLine(s.substr(0, eq) + " " + s.substr(eq + 1));
        }
    } catch (const miniform::NameError& e) {
        std::cerr << "miniform: " << e.message << "\n";
        return 2;
    }
    for (const std::string& d : defines) {
        size_t eq = d.find('=');
        if (eq == std::string::npos)
            cfg.predefine[d] = "1";
        else
            cfg.predefine[d.substr(0, eq)] = d.substr(eq + 1);
    }
    for (const std::string& dir : includeDirs)
        cfg.includePath.push_back(dir);

    std::ofstream logFile;
    std::unique_ptr<TeeBuf> tee;
    std::unique_ptr<std::ostream> teeStream;
    std::ostream* out = &std::cout;
    if (logMirror) {
        std::string logPath = program;
        size_t dot = logPath.find_last_of('.');
        if (dot != std::string::npos)
            logPath.resize(dot);
        logPath += ".log";
        logFile.open(logPath, std::ios::trunc);
        if (!logFile) {
            std::cerr << "miniform: cannot open log file " << logPath << "\n";
            return 2;
        }
        tee = std::make_unique<TeeBuf>(std::cout.rdbuf(), logFile.rdbuf());
        teeStream = std::make_unique<std::ostream>(tee.get());
        out = teeStream.get();
    }

    miniform::Session session(cfg, *out, std::cerr);
    int rc = session.runFile(program);
    out->flush();
    return rc;
}
