int placeholder_test_diagnostics;
