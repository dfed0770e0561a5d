"""spinthermo - спиновые сети для равновесной термометрии"""
