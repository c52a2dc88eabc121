# Utils package for the weighted Bargmann lab
