#pragma once

#include <string>
#include <vector>

namespace agentmesh {

// Built-in pool of common first names used to label agents. 160 entries, all
// unique, so every benchmark size (up to 100 agents and beyond) fits.
inline const std::vector<std::string>& default_name_pool() {
  static const std::vector<std::string> pool = {
      "Aaron",    "Abigail",  "Adam",     "Alan",     "Albert",   "Alice",    "Amanda",   "Amber",
      "Amy",      "Andrea",   "Andrew",   "Angela",   "Anna",     "Anthony",  "Arthur",   "Ashley",
      "Austin",   "Barbara",  "Benjamin", "Betty",    "Beverly",  "Bobby",    "Brandon",  "Brenda",
      "Brian",    "Brittany", "Bruce",    "Bryan",    "Carl",     "Carol",    "Carolyn",  "Catherine",
      "Charles",  "Charlotte","Cheryl",   "Christian","Christina","Christine","Christopher","Cynthia",
      "Daniel",   "Danielle", "David",    "Deborah",  "Debra",    "Denise",   "Dennis",   "Diana",
      "Diane",    "Donald",   "Donna",    "Doris",    "Dorothy",  "Douglas",  "Dylan",    "Edward",
      "Elijah",   "Elizabeth","Emily",    "Emma",     "Eric",     "Ethan",    "Eugene",   "Evelyn",
      "Frances",  "Frank",    "Gabriel",  "Gary",     "George",   "Gerald",   "Gloria",   "Grace",
      "Gregory",  "Hannah",   "Harold",   "Heather",  "Helen",    "Henry",    "Isabella", "Jack",
      "Jacob",    "Jacqueline","James",   "Janet",    "Janice",   "Jason",    "Jean",     "Jeffrey",
      "Jennifer", "Jeremy",   "Jerry",    "Jesse",    "Jessica",  "Joan",     "Joe",      "John",
      "Jonathan", "Jordan",   "Jose",     "Joseph",   "Joshua",   "Joyce",    "Juan",     "Judith",
      "Judy",     "Julia",    "Julie",    "Justin",   "Karen",    "Katherine","Kathleen", "Kathryn",
      "Kayla",    "Keith",    "Kelly",    "Kenneth",  "Kevin",    "Kimberly", "Kyle",     "Larry",
      "Laura",    "Lauren",   "Lawrence", "Linda",    "Lisa",     "Logan",    "Lori",     "Madison",
      "Margaret", "Maria",    "Marie",    "Marilyn",  "Mark",     "Martha",   "Mary",     "Matthew",
      "Megan",    "Melissa",  "Michael",  "Michelle", "Nancy",    "Natalie",  "Nathan",   "Nicholas",
      "Nicole",   "Noah",     "Olivia",   "Pamela",   "Patricia", "Patrick",  "Paul",     "Peter",
      "Rachel",   "Richard",  "Samuel",   "Sara",     "Stephen",  "Timothy",  "Tom",      "Tyler",
  };
  return pool;
}

}  // namespace agentmesh
