# Utility modules for spectrafrac
