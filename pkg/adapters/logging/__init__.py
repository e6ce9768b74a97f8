# Trial logging adapters for property campaigns
