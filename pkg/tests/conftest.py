import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase result to fixtures that report on it
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
