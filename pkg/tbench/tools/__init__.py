# SP Few-Shot - Tools Tests
