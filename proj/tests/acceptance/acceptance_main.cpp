#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>

// Prints one pass/fail line per criterion test case on top of doctest's
// regular output.
namespace {

struct CriterionReporter : public doctest::IReporter {
    const doctest::TestCaseData* current = nullptr;

    explicit CriterionReporter(const doctest::ContextOptions&) {}

    void report_query(const doctest::QueryData&) override {}
    void test_run_start() override {}
    void test_run_end(const doctest::TestRunStats& stats) override {
        std::printf("%s: %u of %u criteria passed\n",
                    stats.numTestCasesFailed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                    stats.numTestCases - stats.numTestCasesFailed, stats.numTestCases);
        std::fflush(stdout);
    }
    void test_case_start(const doctest::TestCaseData& data) override { current = &data; }
    void test_case_reenter(const doctest::TestCaseData&) override {}
    void test_case_end(const doctest::CurrentTestCaseStats& stats) override {
        std::printf("[%s] %s\n", stats.testCaseSuccess ? "PASS" : "FAIL",
                    current ? current->m_name : "?");
        std::fflush(stdout);
    }
    void test_case_exception(const doctest::TestCaseException&) override {}
    void subcase_start(const doctest::SubcaseSignature&) override {}
    void subcase_end() override {}
    void log_assert(const doctest::AssertData&) override {}
    void log_message(const doctest::MessageData&) override {}
    void test_case_skipped(const doctest::TestCaseData&) override {}
};

REGISTER_LISTENER("criteria", 1, CriterionReporter);

}  // namespace

int main(int argc, char** argv) {
    doctest::Context context(argc, argv);
    return context.run();
}
