int placeholder_test_chains;
