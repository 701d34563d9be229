int placeholder_test_batch_cli;
